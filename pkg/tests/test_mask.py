"""Grammar automata, token masks, and constrained generation."""

import random

import pytest

from toonbench.mask import (DeadEndError, RejectError, UnsupportedSchemaError,
                            Vocabulary, advance, allowed_mask,
                            build_toy_vocabulary, constrained_generate,
                            init_state, is_accepting, load_vocabulary,
                            save_vocabulary)
from toonbench.mask.engine import advance_bytes, step_byte
from toonbench.schemas import (ArrayType, IntType, ObjectType, StrType,
                               validate)
from toonbench.toon import encode_toon, parse_toon
from toonbench.values import emit_canonical_json, parse_json


def gold_texts(cases):
    for c in cases:
        yield c, encode_toon(c.gold), emit_canonical_json(c.gold)


# -- vocabulary --------------------------------------------------------------


def test_vocab_save_load_round_trip(tmp_path, vocab):
    p = tmp_path / "vocab.txt"
    save_vocabulary(vocab, p)
    again = load_vocabulary(p)
    assert again.tokens == vocab.tokens


def test_vocab_rejects_sparse_ids(tmp_path):
    p = tmp_path / "vocab.txt"
    p.write_text("0\t41\n2\t42\n")
    with pytest.raises(ValueError):
        load_vocabulary(p)


def test_vocab_rejects_empty_tokens():
    with pytest.raises(ValueError):
        Vocabulary([b"a", b""])


def test_build_toy_vocabulary_is_deterministic(cases):
    corpus = [encode_toon(c.gold) for c in cases]
    v1 = build_toy_vocabulary(corpus)
    v2 = build_toy_vocabulary(corpus)
    assert v1.tokens == v2.tokens
    assert v1.tokens[:256] == [bytes([b]) for b in range(256)]
    assert all(2 <= len(t) <= 6 for t in v1.tokens[256:])


def test_shipped_vocab_matches_gold_corpus(cases, vocab):
    corpus = [encode_toon(c.gold) for c in cases]
    corpus += [emit_canonical_json(c.gold) for c in cases]
    assert build_toy_vocabulary(corpus).tokens == vocab.tokens


# -- states and stepping -----------------------------------------------------


def test_init_modes(case_by_name):
    init_state("toon")
    init_state("json")
    init_state("toon", case_by_name["order"].schema)
    with pytest.raises(UnsupportedSchemaError):
        init_state("json", case_by_name["order"].schema)
    with pytest.raises(ValueError):
        init_state("yaml")


def test_gold_documents_accepted(cases):
    for c, toon_text, json_text in gold_texts(cases):
        for schema in (None, c.schema):
            st = advance_bytes(init_state("toon", schema), toon_text.encode())
            assert is_accepting(st), (c.name, schema is not None)
        st = advance_bytes(init_state("json"), json_text.encode())
        assert is_accepting(st), c.name


def test_reject_reports_byte_offset(vocab):
    st = init_state("toon")
    with pytest.raises(RejectError) as ei:
        advance_bytes(st, b"a:x")  # missing space after the colon
    assert ei.value.byte_offset == 2


def test_non_ascii_bytes_rejected(case_by_name):
    # U+00B2 is a Unicode digit; it must not slip into an int position
    st = advance_bytes(init_state("toon", case_by_name["order"].schema),
                       b"id: ")
    assert step_byte(st, 0xB2) is None
    assert step_byte(st, ord("1")) is not None


def test_count_must_match_rows(case_by_name):
    schema = case_by_name["users"].schema
    prefix = b"users[1]{id,name,email,role}:\n  1,a,b,c\n"
    st = advance_bytes(init_state("toon", schema), prefix)
    assert is_accepting(st)
    # a second row is one too many: no legal way to start it
    assert step_byte(advance_bytes(init_state("toon", schema), prefix),
                     ord(" ")) is None
    # with [2] declared, the document is not accepting after one row
    st = advance_bytes(init_state("toon", schema),
                       b"users[2]{id,name,email,role}:\n  1,a,b,c\n")
    assert not is_accepting(st)


def test_schema_pins_first_key(case_by_name):
    st = init_state("toon", case_by_name["order"].schema)
    legal = {bytes([b]) for b in range(256) if step_byte(st, b) is not None}
    assert legal == {b"i"}  # the order schema starts with "id"


def test_schema_pins_key_order(case_by_name):
    schema = case_by_name["order"].schema
    with pytest.raises(RejectError):
        advance_bytes(init_state("toon", schema), b"customer")


def test_unconstrained_duplicate_key_rejected():
    with pytest.raises(RejectError):
        advance_bytes(init_state("toon"), b"a: 1\na:")


def test_json_mode_checks_well_formedness():
    ok = advance_bytes(init_state("json"), b'{"a": [1, 2], "b": null}')
    assert is_accepting(ok)
    with pytest.raises(RejectError):
        advance_bytes(init_state("json"), b'{"a": 1, "a":')
    with pytest.raises(RejectError):
        advance_bytes(init_state("json"), b"[1, 2]")  # root must be an object
    assert not is_accepting(advance_bytes(init_state("json"), b'{"a": {'))


# -- masks -------------------------------------------------------------------


def brute_force_mask(state, vocab):
    out = set()
    for tid in range(len(vocab)):
        try:
            advance(state, tid, vocab)
            out.add(tid)
        except RejectError:
            pass
    return frozenset(out)


def test_mask_matches_brute_force_along_gold_docs(cases, vocab):
    rng = random.Random(11)
    for c, toon_text, json_text in gold_texts(cases):
        for mode, schema, text in (("toon", c.schema, toon_text),
                                   ("toon", None, toon_text),
                                   ("json", None, json_text)):
            data = text.encode()
            cur = init_state(mode, schema)
            offsets = sorted(rng.sample(range(len(data) + 1),
                                        min(8, len(data) + 1)))
            pos = 0
            for off in offsets:
                cur = advance_bytes(cur, data[pos:off])
                pos = off
                mask = allowed_mask(cur, vocab)
                assert mask.allowed == brute_force_mask(cur, vocab), \
                    (c.name, mode, off)


def test_mask_accepting_mirrors_is_accepting(case_by_name, vocab):
    st = advance_bytes(init_state("toon"), b"a: 1\n")
    assert allowed_mask(st, vocab).accepting and is_accepting(st)
    st = advance_bytes(init_state("toon"), b"a: 1")
    # mid-line states accept via the simulated newline
    assert allowed_mask(st, vocab).accepting == is_accepting(st)


def test_tokenization_independence(cases, vocab):
    """Consuming a document token-by-token, for any greedy segmentation,
    lands in the same state as byte-by-byte consumption."""
    rng = random.Random(5)
    for c, toon_text, _ in gold_texts(cases):
        data = toon_text.encode()
        byte_state = init_state("toon", c.schema)
        states = [byte_state]
        for b in data:
            byte_state = step_byte(byte_state, b)
            states.append(byte_state)
        # random token segmentation via the trie
        pos = 0
        tok_state = states[0]
        while pos < len(data):
            candidates = [t for t in range(len(vocab))
                          if data.startswith(vocab.token_bytes(t), pos)]
            t = rng.choice(candidates)
            tok_state = advance(tok_state, t, vocab)
            pos += len(vocab.token_bytes(t))
            assert tok_state == states[pos]


# -- constrained generation --------------------------------------------------


def _greedy_gold_policy(target: bytes, vocab):
    """Score longest target-prefix tokens highest, end-of-sequence when done."""
    V = len(vocab)

    def policy(i, state):
        del i, state
        return None  # replaced below; stateful closure instead

    progress = {"pos": 0}

    def policy(step, state):  # noqa: F811
        del step, state
        pos = progress["pos"]
        scores = [0.0] * (V + 1)
        if pos >= len(target):
            scores[V] = 100.0
            return scores
        best_len = 0
        for t in range(V):
            tb = vocab.token_bytes(t)
            if target.startswith(tb, pos):
                scores[t] = float(len(tb))
                best_len = max(best_len, len(tb))
        progress["pos"] = pos + best_len
        return scores

    return policy


def test_generate_reproduces_gold(cases, vocab):
    for c, toon_text, _ in gold_texts(cases):
        target = toon_text.encode()
        out = constrained_generate(_greedy_gold_policy(target, vocab), vocab,
                                   init_state("toon", c.schema))
        assert out == target, c.name


def test_generate_ties_break_to_lowest_token_id(vocab):
    st = init_state("toon")

    def flat(step, state):
        del step, state
        return [1.0] * (len(vocab) + 1)

    # all-equal scores: end-of-sequence wins as soon as the state accepts,
    # and before that the lowest legal token id is taken every step
    out = constrained_generate(flat, vocab, st, max_steps=200)
    st2 = init_state("toon")
    replay = bytearray()
    while not is_accepting(st2):
        tid = min(allowed_mask(st2, vocab).allowed)
        replay.extend(vocab.token_bytes(tid))
        st2 = advance(st2, tid, vocab)
    assert bytes(out) == bytes(replay)


def test_generate_output_always_parses(cases, vocab):
    rng = random.Random(99)
    V = len(vocab)
    bonus = []
    for t in range(V):
        tb = vocab.token_bytes(t)
        score = -0.2 * len(tb)
        if 0x0A in tb:
            score += 3.0
        if tb in (b"0", b'"'):
            score += 1.5
        bonus.append(score)

    def policy(step, state):
        del step, state
        scores = [rng.random() + bonus[t] for t in range(V)]
        scores.append(8.0)
        return scores

    for c in cases:
        for seed in range(3):
            rng.seed(seed * 1000 + len(c.name))
            out = constrained_generate(policy, vocab,
                                       init_state("toon", c.schema),
                                       max_steps=5000)
            value = parse_toon(out.decode("ascii")).root
            assert validate(value, c.schema) == [], c.name


def test_generate_json_mode_output_parses(vocab):
    rng = random.Random(3)
    V = len(vocab)
    bonus = []
    for t in range(V):
        tb = vocab.token_bytes(t)
        score = -0.2 * len(tb)
        if any(x in tb for x in (0x09, 0x0A, 0x0D, 0x20)):
            score -= 3.0
        if tb == b'"':
            score += 3.0
        if tb == b"}":
            score += 2.0
        bonus.append(score)

    def policy(step, state):
        del step, state
        scores = [rng.random() + bonus[t] for t in range(V)]
        scores.append(8.0)
        return scores

    for seed in range(5):
        rng.seed(seed)
        out = constrained_generate(policy, vocab, init_state("json"),
                                   max_steps=5000)
        parsed = parse_json(out.decode("ascii"))
        assert isinstance(parsed, dict)


def test_generate_policy_arity_checked(vocab):
    with pytest.raises(ValueError):
        constrained_generate(lambda i, s: [0.0] * 3, vocab, init_state("toon"))


def test_deep_schema_rejected_at_init():
    schema = ObjectType(fields=(("leaf", IntType()),))
    for _ in range(20):
        schema = ObjectType(fields=(("wrap", schema),))
    with pytest.raises(UnsupportedSchemaError):
        init_state("toon", schema)
