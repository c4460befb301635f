"""Incremental byte-level recognizer for the TOON grammar.

States are nested tuples ``(started, stack, line)`` and therefore hashable;
``step`` returns a new state or ``None`` on rejection.  The recognized
language is a slight restriction of what :func:`toonbench.toon.parse_toon`
accepts (ASCII content, bounded identifiers/counts/nesting), so every byte
string accepted here parses.

With a schema the machine additionally pins key names and order (schema
declaration order), array layouts, and scalar lexeme shapes, so accepted
documents also validate.
"""

from __future__ import annotations

from ..schemas import ArrayType, BoolType, FloatType, IntType, ObjectType, StrType

MAX_DEPTH = 16
MAX_KEY = 64
MAX_COUNT_DIGITS = 3
MAX_INT_DIGITS = 19

_EMPTY = frozenset()

SP = 0x20
NL = 0x0A


def _printable(b: int) -> bool:
    return 0x20 <= b <= 0x7E


_KEY_START = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_")
_KEY_CHARS = _KEY_START | frozenset(b".-")


def _key_start(b: int) -> bool:
    return b in _KEY_START


def _key_char(b: int) -> bool:
    return b in _KEY_CHARS


_ESC_SET = frozenset(b'"\\ntr/')


def _scalar_schema(s) -> bool:
    return isinstance(s, (IntType, FloatType, StrType, BoolType))


def _tabular_schema(s) -> bool:
    return (isinstance(s, ObjectType) and len(s.fields) > 0
            and all(_scalar_schema(fs) for _, fs in s.fields))


# Literal-prefix tracking for bare strings under a StrType constraint: the
# finished lexeme must not read back as a number/bool/null.
_LITERALS = ("true", "false", "null")

# Numeral DFA: m(minus) i(int,ACC) d(dot) f(frac,ACC) e es x(exp,ACC) X(broken)
_NUM_ACC = frozenset("ifx")


def _num_step(st: str, c: str) -> str:
    if st == "X":
        return "X"
    if st == "":  # first char
        if c == "-":
            return "m"
        if c.isdigit():
            return "i"
        return "X"
    if st == "m":
        return "i" if c.isdigit() else "X"
    if st == "i":
        if c.isdigit():
            return "i"
        if c == ".":
            return "d"
        if c in "eE":
            return "e"
        return "X"
    if st == "d":
        return "f" if c.isdigit() else "X"
    if st == "f":
        if c.isdigit():
            return "f"
        if c in "eE":
            return "e"
        return "X"
    if st == "e":
        if c in "+-":
            return "es"
        return "x" if c.isdigit() else "X"
    if st == "es":
        return "x" if c.isdigit() else "X"
    if st == "x":
        return "x" if c.isdigit() else "X"
    return "X"


def _lit_step(lp, c: str):
    """lp is (index, pos) into _LITERALS or None once broken."""
    if lp is None:
        return None
    li, pos = lp
    word = _LITERALS[li]
    if pos < len(word) and word[pos] == c:
        return (li, pos + 1)
    return None


def _lit_start(c: str):
    for li, word in enumerate(_LITERALS):
        if word[0] == c:
            return (li, 1)
    return None


def _lit_done(lp) -> bool:
    return lp is not None and lp[1] == len(_LITERALS[lp[0]])


def _schema_frame_depth(s) -> int:
    if isinstance(s, ObjectType):
        return 1 + max((_schema_extra(fs) for _, fs in s.fields), default=0)
    return _schema_extra(s)


def _schema_extra(s) -> int:
    if isinstance(s, ObjectType):
        return _schema_frame_depth(s)
    if isinstance(s, ArrayType):
        return 1 + _schema_extra(s.element)
    return 0


def initial(schema=None):
    if schema is None:
        stack = (("obj", 0, _EMPTY),)
    else:
        if not isinstance(schema, ObjectType):
            raise ValueError("toon documents require an object-typed schema root")
        if _schema_frame_depth(schema) > MAX_DEPTH:
            raise ValueError(f"schema nesting exceeds the depth bound of {MAX_DEPTH}")
        stack = (("sobj", 0, schema.fields),)
    return (False, stack, ("ind", 0))


def _frame_rem(frame):
    tag = frame[0]
    if tag in ("larr", "tarr"):
        return frame[2]
    if tag in ("slarr", "starr"):
        return frame[2]
    return 0


def _poppable(frame) -> bool:
    tag = frame[0]
    if tag == "obj":
        return True
    if tag == "sobj":
        return len(frame[2]) == 0
    return _frame_rem(frame) == 0


def _content_capable(frame) -> bool:
    """Can this frame still accept a content line at its column?"""
    tag = frame[0]
    if tag == "obj":
        return True
    if tag == "sobj":
        return len(frame[2]) > 0
    return _frame_rem(frame) > 0


def _max_content_col(stack) -> int:
    """Deepest column at which a content line is still legal: the column of
    the topmost capable frame (frames above it must be poppable)."""
    for frame in reversed(stack):
        if _content_capable(frame):
            return frame[1]
        if not _poppable(frame):
            return -1
    return -1


def counters_clear(state) -> bool:
    for frame in state[1]:
        if not _poppable(frame):
            return False
    return True


def accepting(state) -> bool:
    started, stack, line = state
    if not started:
        return False
    if line == ("ind", 0):
        return counters_clear(state)
    if line[0] == "ind":
        return False
    s2 = step(state, NL)
    return s2 is not None and counters_clear(s2)


def _push(stack, frame):
    if len(stack) >= MAX_DEPTH:
        return None
    return stack + (frame,)


def _top(stack):
    return stack[-1]


def _replace_top(stack, frame):
    return stack[:-1] + (frame,)


def _end_line(started, stack):
    return (True, stack, ("ind", 0))


# -- content-start dispatch --------------------------------------------------


def _dispatch(stack, b):
    """First content byte of a line, with the indent already resolved so the
    top frame's col equals the line's indent.  Returns (stack, line) or None."""
    frame = _top(stack)
    tag = frame[0]
    c = chr(b)
    if tag == "obj":
        if b == 0x22:  # '"'
            return stack, ("qkey", (), 0)
        if _key_start(b):
            return stack, ("key", (c,))
        return None
    if tag == "sobj":
        fields = frame[2]
        if not fields:
            return None
        expect = fields[0][0]
        if c == expect[0]:
            return stack, ("skey", 1)
        return None
    if tag in ("larr", "slarr"):
        if c != "-" or frame[2] == 0:
            return None
        # decrement remaining now; the item line is committed
        if tag == "larr":
            nf = ("larr", frame[1], frame[2] - 1)
        else:
            nf = ("slarr", frame[1], frame[2] - 1, frame[3])
        return _replace_top(stack, nf), ("dash",)
    if tag == "tarr":
        if frame[2] == 0:
            return None
        return _begin_cell_u(stack, 0, b)
    if tag == "starr":
        if frame[2] == 0:
            return None
        line = _begin_typed(frame[3][0], ("c", 0), b)
        if line is None:
            return None
        return stack, line
    return None


def _begin_cell_u(stack, idx, b):
    if b == 0x22:
        return stack, ("rq", idx, 0)
    if b == SP or b == 0x2C or not _printable(b):  # no leading space, no empty cell
        return None
    return stack, ("rb", idx, False)


def _begin_typed(fs, ctx, b):
    """Micro-state for the first byte of a typed scalar; None if illegal."""
    c = chr(b)
    if isinstance(fs, IntType):
        if c == "-":
            return ("sint", "m", 0, ctx)
        if c == "0":
            return ("sint", "z", 1, ctx)
        if c.isdigit():
            return ("sint", "i", 1, ctx)
        return None
    if isinstance(fs, FloatType):
        st = _num_step("", c)
        if st == "X":
            return None
        return ("sflt", st, ctx)
    if isinstance(fs, BoolType):
        if c == "t":
            return ("slit", "true", 1, ctx)
        if c == "f":
            return ("slit", "false", 1, ctx)
        return None
    if isinstance(fs, StrType):
        if b == 0x22:
            return ("sq", 0, ctx)
        if c == " " or not _printable(b):
            return None
        if ctx[0] == "c" and c == ",":
            return None
        return ("sb", _num_step("", c), _lit_start(c), False, ctx)
    return None


# -- helpers applying line effects ------------------------------------------


def _commit_key(stack, key):
    """Key text finished (':' or '[' seen): record it on the top object frame."""
    frame = _top(stack)
    if frame[0] == "obj":
        if key in frame[2]:
            return None
        return _replace_top(stack, ("obj", frame[1], frame[2] | {key}))
    return None


def _array_elem_layout(elem, count):
    """'tab' when the schema forces tabular layout, else 'list'."""
    if count > 0 and _tabular_schema(elem):
        return "tab"
    return "list"


def _push_array(stack, marker, count, col):
    """Push the frame for a completed list-array header line; ``col`` is the
    column where the array's items/rows will sit."""
    if marker == "u":
        return _push(stack, ("larr", col, count))
    elem = marker[1]
    return _push(stack, ("slarr", col, count, elem))


def _push_tabular_u(stack, count, arity, col):
    return _push(stack, ("tarr", col, count, arity))


def _push_tabular_s(stack, count, elem, col):
    cols = tuple(fs for _, fs in elem.fields)
    return _push(stack, ("starr", col, count, cols))


def _row_done(stack):
    frame = _top(stack)
    if frame[0] == "tarr":
        return _replace_top(stack, ("tarr", frame[1], frame[2] - 1, frame[3]))
    return _replace_top(stack, ("starr", frame[1], frame[2] - 1, frame[3]))


# -- main transition ---------------------------------------------------------


def step(state, b: int):
    if b != NL and not (0x20 <= b <= 0x7E):
        return None
    started, stack, line = state
    tag = line[0]
    c = chr(b)

    # ---- line start / indent
    if tag == "ind":
        n = line[1]
        if b == SP:
            n += 1
            # never indent past the deepest frame that can still take a line,
            # otherwise the consumed spaces would have no legal continuation
            if n > _max_content_col(stack):
                return None
            return (started, stack, ("ind", n))
        if b == NL or not _printable(b):
            return None
        # resolve dedents
        s = stack
        while _top(s)[1] > n:
            if not _poppable(_top(s)):
                return None
            s = s[:-1]
        if _top(s)[1] != n:
            return None
        r = _dispatch(s, b)
        if r is None:
            return None
        s2, line2 = r
        return (True, s2, line2)

    # ---- unconstrained bare key
    if tag == "key":
        chars = line[1]
        if c == ":":
            s2 = _commit_key(stack, "".join(chars))
            if s2 is None:
                return None
            return (started, s2, ("val0",))
        if c == "[":
            if len(stack) >= MAX_DEPTH:
                return None
            s2 = _commit_key(stack, "".join(chars))
            if s2 is None:
                return None
            return (started, s2, ("cnt", "u", 0, 0, _top(s2)[1] + 2))
        if _key_char(b) and len(chars) < MAX_KEY:
            return (started, stack, ("key", chars + (c,)))
        return None

    # ---- quoted key
    if tag == "qkey":
        chars, esc = line[1], line[2]
        if esc:
            if b in _ESC_SET:
                dec = {0x6E: "\n", 0x74: "\t", 0x72: "\r"}.get(b, c)
                if len(chars) >= MAX_KEY:
                    return None
                return (started, stack, ("qkey", chars + (dec,), 0))
            return None
        if c == '"':
            return (started, stack, ("keyend", chars))
        if c == "\\":
            return (started, stack, ("qkey", chars, 1))
        if _printable(b) and len(chars) < MAX_KEY:
            return (started, stack, ("qkey", chars + (c,), 0))
        return None

    if tag == "keyend":
        key = "".join(line[1])
        if c == ":":
            s2 = _commit_key(stack, key)
            return None if s2 is None else (started, s2, ("val0",))
        if c == "[":
            if len(stack) >= MAX_DEPTH:
                return None
            s2 = _commit_key(stack, key)
            if s2 is None:
                return None
            return (started, s2, ("cnt", "u", 0, 0, _top(s2)[1] + 2))
        return None

    # ---- schema key (exact spelling)
    if tag == "skey":
        pos = line[1]
        frame = _top(stack)
        name, fs = frame[2][0]
        if pos < len(name):
            if c == name[pos]:
                return (started, stack, ("skey", pos + 1))
            return None
        # key complete: consume the field from the frame
        s2 = _replace_top(stack, ("sobj", frame[1], frame[2][1:]))
        if c == ":":
            if isinstance(fs, ObjectType):
                return (started, s2, ("onl", fs))
            if _scalar_schema(fs):
                return (started, s2, ("sp", fs))
            return None
        if c == "[" and isinstance(fs, ArrayType):
            return (started, s2, ("cnt", ("s", fs.element), 0, 0, _top(s2)[1] + 2))
        return None

    if tag == "onl":
        if b == NL:
            fs = line[1]
            s2 = _push(stack, ("sobj", _top(stack)[1] + 2, fs.fields))
            return None if s2 is None else _end_line(started, s2)
        return None

    if tag == "sp":
        if b == SP:
            return (started, stack, ("tvs", line[1], "v"))
        return None

    if tag == "tvs":
        micro = _begin_typed(line[1], line[2], b)
        return None if micro is None else (started, stack, micro)

    # ---- array count
    if tag == "cnt":
        marker, val, nd, ccol = line[1], line[2], line[3], line[4]
        if c.isdigit():
            if nd >= MAX_COUNT_DIGITS or (nd == 1 and val == 0):
                return None
            return (started, stack, ("cnt", marker, val * 10 + int(c), nd + 1, ccol))
        if c == "]" and nd > 0:
            return (started, stack, ("pc", marker, val, ccol))
        return None

    if tag == "pc":
        marker, n, ccol = line[1], line[2], line[3]
        if marker == "u":
            if c == ":":
                return (started, stack, ("lh", marker, n, ccol))
            if c == "{":
                return (started, stack, ("hstart", n, (), ccol))
            return None
        elem = marker[1]
        if _array_elem_layout(elem, n) == "tab":
            if c == "{":
                expected = ",".join(name for name, _ in elem.fields) + "}:"
                return (started, stack, ("shdr", n, elem, expected, 0, ccol))
            return None
        if c == ":":
            return (started, stack, ("lh", marker, n, ccol))
        return None

    if tag == "lh":
        if b == NL:
            s2 = _push_array(stack, line[1], line[2], line[3])
            return None if s2 is None else _end_line(started, s2)
        return None

    # ---- unconstrained tabular header
    if tag == "hstart":
        n, done, ccol = line[1], line[2], line[3]
        if b == 0x22:
            return (started, stack, ("hq", n, done, (), 0, ccol))
        if _key_start(b):
            return (started, stack, ("hbare", n, done, (c,), ccol))
        return None

    if tag == "hbare":
        n, done, chars, ccol = line[1], line[2], line[3], line[4]
        if c == ",":
            h = "".join(chars)
            if h in done:
                return None
            return (started, stack, ("hstart", n, done + (h,), ccol))
        if c == "}":
            h = "".join(chars)
            if h in done:
                return None
            return (started, stack, ("ph", n, len(done) + 1, ccol))
        if _key_char(b) and len(chars) < MAX_KEY:
            return (started, stack, ("hbare", n, done, chars + (c,), ccol))
        return None

    if tag == "hq":
        n, done, chars, esc, ccol = line[1], line[2], line[3], line[4], line[5]
        if esc:
            if b in _ESC_SET:
                dec = {0x6E: "\n", 0x74: "\t", 0x72: "\r"}.get(b, c)
                if len(chars) >= MAX_KEY:
                    return None
                return (started, stack, ("hq", n, done, chars + (dec,), 0, ccol))
            return None
        if c == '"':
            return (started, stack, ("hqe", n, done, chars, ccol))
        if c == "\\":
            return (started, stack, ("hq", n, done, chars, 1, ccol))
        if _printable(b) and len(chars) < MAX_KEY:
            return (started, stack, ("hq", n, done, chars + (c,), 0, ccol))
        return None

    if tag == "hqe":
        n, done, chars, ccol = line[1], line[2], line[3], line[4]
        h = "".join(chars)
        if h in done:
            return None
        if c == ",":
            return (started, stack, ("hstart", n, done + (h,), ccol))
        if c == "}":
            return (started, stack, ("ph", n, len(done) + 1, ccol))
        return None

    if tag == "ph":
        if c == ":":
            return (started, stack, ("th", line[1], line[2], line[3]))
        return None

    if tag == "th":
        if b == NL:
            s2 = _push_tabular_u(stack, line[1], line[2], line[3])
            return None if s2 is None else _end_line(started, s2)
        return None

    # ---- schema tabular header (exact spelling)
    if tag == "shdr":
        n, elem, expected, pos, ccol = line[1], line[2], line[3], line[4], line[5]
        if c == expected[pos]:
            pos += 1
            if pos == len(expected):
                return (started, stack, ("sth", n, elem, ccol))
            return (started, stack, ("shdr", n, elem, expected, pos, ccol))
        return None

    if tag == "sth":
        if b == NL:
            s2 = _push_tabular_s(stack, line[1], line[2], line[3])
            return None if s2 is None else _end_line(started, s2)
        return None

    # ---- unconstrained values
    if tag == "val0":
        if b == NL:
            s2 = _push(stack, ("obj", _top(stack)[1] + 2, _EMPTY))
            return None if s2 is None else _end_line(started, s2)
        if b == SP:
            return (started, stack, ("val1",))
        return None

    if tag == "val1":
        if b == 0x22:
            return (started, stack, ("qval", 0))
        if b == SP or b == NL or not _printable(b):
            return None
        return (started, stack, ("bval", False))

    if tag == "bval":
        tsp = line[1]
        if b == NL:
            return None if tsp else _end_line(started, stack)
        if _printable(b):
            return (started, stack, ("bval", b == SP))
        return None

    if tag == "qval":
        esc = line[1]
        if esc:
            if b == 0x75:  # \u
                return (started, stack, ("qvalu", 4))
            return (started, stack, ("qval", 0)) if b in _ESC_SET else None
        if c == '"':
            return (started, stack, ("eol",))
        if c == "\\":
            return (started, stack, ("qval", 1))
        return (started, stack, ("qval", 0)) if _printable(b) else None

    if tag == "qvalu":
        k = line[1]
        if c is not None and c in "0123456789abcdefABCDEF":
            return (started, stack, ("qvalu", k - 1)) if k > 1 else (started, stack, ("qval", 0))
        return None

    if tag == "eol":
        if b == NL:
            return _end_line(started, stack)
        return None

    # ---- list items
    if tag == "dash":
        if b == NL:
            # bare '-' is an empty-object item; under a schema that is only
            # valid when the element type is an empty object
            frame = _top(stack)
            if frame[0] == "slarr":
                elem = frame[3]
                if not (isinstance(elem, ObjectType) and not elem.fields):
                    return None
            return _end_line(started, stack)
        if b == SP:
            frame = _top(stack)
            if frame[0] == "slarr":
                elem = frame[3]
                if isinstance(elem, ObjectType):
                    if not elem.fields:
                        return None
                    s2 = _push(stack, ("sobj", frame[1] + 2, elem.fields))
                    return None if s2 is None else (started, s2, ("scs",))
                if isinstance(elem, ArrayType):
                    return (started, stack, ("iarr", elem))
                return (started, stack, ("tvs", elem, "v"))
            return (started, stack, ("item0",))
        return None

    if tag == "scs":
        # schema item content start: first byte of the expected first key
        r = _dispatch(stack, b)
        if r is None:
            return None
        s2, line2 = r
        return (started, s2, line2)

    if tag == "iarr":
        if c == "[":
            # header sits two columns right of the dash; its items two more
            return (started, stack, ("cnt", ("s", line[1].element), 0, 0,
                                     _top(stack)[1] + 4))
        return None

    if tag == "item0":
        if c == "[":
            if len(stack) >= MAX_DEPTH:
                return None
            return (started, stack, ("cnt", "u", 0, 0, _top(stack)[1] + 4))
        if b == 0x22:
            return (started, stack, ("iq", (), 0))
        if b == SP or b == NL or not _printable(b):
            return None
        return (started, stack, ("ib", (c,), False))

    if tag == "ib":
        chars, tsp = line[1], line[2]
        if c == ":":
            if tsp:
                return None
            key = "".join(chars)
            s2 = _push(stack, ("obj", _top(stack)[1] + 2, frozenset((key,))))
            return None if s2 is None else (started, s2, ("val0",))
        if c == "[":
            # the object frame plus the array frame must both fit
            if tsp or len(stack) + 1 >= MAX_DEPTH:
                return None
            key = "".join(chars)
            s2 = _push(stack, ("obj", _top(stack)[1] + 2, frozenset((key,))))
            if s2 is None:
                return None
            return (started, s2, ("cnt", "u", 0, 0, _top(s2)[1] + 2))
        if b == NL:
            return None if tsp else _end_line(started, stack)  # scalar item
        if _printable(b) and len(chars) < MAX_KEY:
            return (started, stack, ("ib", chars + (c,), b == SP))
        return None

    if tag == "iq":
        chars, esc = line[1], line[2]
        if esc:
            if b in _ESC_SET:
                dec = {0x6E: "\n", 0x74: "\t", 0x72: "\r"}.get(b, c)
                if len(chars) >= MAX_KEY:
                    return None
                return (started, stack, ("iq", chars + (dec,), 0))
            return None
        if c == '"':
            return (started, stack, ("iqe", chars))
        if c == "\\":
            return (started, stack, ("iq", chars, 1))
        if _printable(b) and len(chars) < MAX_KEY:
            return (started, stack, ("iq", chars + (c,), 0))
        return None

    if tag == "iqe":
        key = "".join(line[1])
        if b == NL:
            return _end_line(started, stack)  # quoted scalar item
        if c == ":":
            s2 = _push(stack, ("obj", _top(stack)[1] + 2, frozenset((key,))))
            return None if s2 is None else (started, s2, ("val0",))
        if c == "[":
            if len(stack) + 1 >= MAX_DEPTH:
                return None
            s2 = _push(stack, ("obj", _top(stack)[1] + 2, frozenset((key,))))
            if s2 is None:
                return None
            return (started, s2, ("cnt", "u", 0, 0, _top(s2)[1] + 2))
        return None

    # ---- unconstrained tabular rows
    if tag == "rs":
        r = _begin_cell_u(stack, line[1], b)
        if r is None:
            return None
        s2, line2 = r
        return (started, s2, line2)

    if tag == "rb":
        idx, tsp = line[1], line[2]
        arity = _top(stack)[3]
        if c == ",":
            if tsp or idx + 1 >= arity:
                return None
            return (started, stack, ("rs", idx + 1))
        if b == NL:
            if tsp or idx + 1 != arity:
                return None
            return _end_line(started, _row_done(stack))
        if _printable(b):
            return (started, stack, ("rb", idx, b == SP))
        return None

    if tag == "rq":
        idx, esc = line[1], line[2]
        if esc:
            if b == 0x75:
                return (started, stack, ("rqu", idx, 4))
            return (started, stack, ("rq", idx, 0)) if b in _ESC_SET else None
        if c == '"':
            return (started, stack, ("rqe", idx))
        if c == "\\":
            return (started, stack, ("rq", idx, 1))
        return (started, stack, ("rq", idx, 0)) if _printable(b) else None

    if tag == "rqu":
        idx, k = line[1], line[2]
        if c is not None and c in "0123456789abcdefABCDEF":
            return (started, stack, ("rqu", idx, k - 1)) if k > 1 else (started, stack, ("rq", idx, 0))
        return None

    if tag == "rqe":
        idx = line[1]
        arity = _top(stack)[3]
        if c == ",":
            if idx + 1 >= arity:
                return None
            return (started, stack, ("rs", idx + 1))
        if b == NL:
            if idx + 1 != arity:
                return None
            return _end_line(started, _row_done(stack))
        return None

    # ---- typed scalars (schema mode)
    if tag in ("sint", "sflt", "slit", "sb", "sq", "squ", "sqe"):
        return _typed_step(started, stack, line, b, c)

    return None


def _typed_end(started, stack, line_ctx, b):
    """Terminator byte for a typed scalar; returns new state or None."""
    if line_ctx == "v":
        if b == NL:
            return _end_line(started, stack)
        return None
    _, idx = line_ctx
    frame = _top(stack)
    cols = frame[3]
    if b == 0x2C:  # ','
        if idx + 1 >= len(cols):
            return None
        return (started, stack, ("tvs", cols[idx + 1], ("c", idx + 1)))
    if b == NL:
        if idx + 1 != len(cols):
            return None
        return _end_line(started, _row_done(stack))
    return None


def _typed_step(started, stack, line, b, c):
    tag = line[0]
    if tag == "sint":
        st, nd, ctx = line[1], line[2], line[3]
        if c is not None and c.isdigit():
            if st == "m":
                if c == "0":
                    return (started, stack, ("sint", "z", 1, ctx))
                return (started, stack, ("sint", "i", 1, ctx))
            if st == "i" and nd < MAX_INT_DIGITS:
                return (started, stack, ("sint", "i", nd + 1, ctx))
            return None
        if st in ("z", "i"):
            return _typed_end(started, stack, ctx, b)
        return None
    if tag == "sflt":
        st, ctx = line[1], line[2]
        if c is not None:
            nxt = _num_step(st, c)
            if nxt != "X":
                return (started, stack, ("sflt", nxt, ctx))
        if st in _NUM_ACC:
            return _typed_end(started, stack, ctx, b)
        return None
    if tag == "slit":
        word, pos, ctx = line[1], line[2], line[3]
        if pos < len(word):
            if c == word[pos]:
                return (started, stack, ("slit", word, pos + 1, ctx))
            return None
        return _typed_end(started, stack, ctx, b)
    if tag == "sb":
        num, lit, tsp, ctx = line[1], line[2], line[3], line[4]
        if b == NL or (ctx != "v" and b == 0x2C):
            if tsp or num in _NUM_ACC or _lit_done(lit):
                return None
            return _typed_end(started, stack, ctx, b)
        if not _printable(b):
            return None
        return (started, stack, ("sb", _num_step(num, c), _lit_step(lit, c), b == SP, ctx))
    if tag == "sq":
        esc, ctx = line[1], line[2]
        if esc:
            if b == 0x75:
                return (started, stack, ("squ", 4, ctx))
            return (started, stack, ("sq", 0, ctx)) if b in _ESC_SET else None
        if c == '"':
            return (started, stack, ("sqe", ctx))
        if c == "\\":
            return (started, stack, ("sq", 1, ctx))
        return (started, stack, ("sq", 0, ctx)) if _printable(b) else None
    if tag == "squ":
        k, ctx = line[1], line[2]
        if c is not None and c in "0123456789abcdefABCDEF":
            return (started, stack, ("squ", k - 1, ctx)) if k > 1 else (started, stack, ("sq", 0, ctx))
        return None
    if tag == "sqe":
        return _typed_end(started, stack, line[1], b)
    return None
