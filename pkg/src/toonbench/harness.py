"""Benchmark execution: model × case × track × run, with repair cycles.

Per attempt the pipeline is: render the prompt (or the repair prompt built
from the latest failed output), call the model, decode (TOON tracks go
through fence extraction and TOON parsing), validate against the case
schema, canonicalize, and compare deep-structurally with the gold payload.
Any failure produces error text that feeds the next repair prompt; a case
stops at the first success or after 1 + max_repairs attempts.

Results are written at case granularity to CSV (deterministically ordered)
with attempt-level detail in a JSON-lines log; an interrupted run resumes by
skipping cells already present in the CSV.
"""

from __future__ import annotations

import csv
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .client import (ApiError, ChatRequest, ChatResponse, ScriptedClient,
                     TransportError, estimate_tokens)
from .prompts import TRACKS, render_prompt, render_repair_prompt
from .schemas import CaseSpec, CASE_NAMES, builtin_cases, validate
from .toon import ToonError, encode_toon, extract_toon_block, parse_toon
from .values import (JsonParseError, canonicalize, deep_equal,
                     emit_canonical_json, format_path, parse_json)

MAX_REPAIRS = 3

OUTCOMES = ("success", "decode_error", "validation_error", "mismatch",
            "transport_error")

CSV_COLUMNS = ("model", "run_index", "case", "track", "one_shot_success",
               "final_success", "attempts", "prompt_tokens",
               "completion_tokens", "flags")


class MissingCase(Exception):
    """A run's metrics were requested with a case/track cell absent."""


class ConfigError(Exception):
    """Invalid benchmark configuration; raised before any network call."""


@dataclass(frozen=True)
class AttemptRecord:
    attempt_index: int  # 1-based; at most 1 + max_repairs
    outcome: str  # one of OUTCOMES
    prompt_tokens: int
    completion_tokens: int
    raw_output: str
    error_text: str = ""  # empty on success

    def __post_init__(self):
        assert self.outcome in OUTCOMES


@dataclass
class CaseResult:
    model: str
    case: str
    track: str
    attempts: List[AttemptRecord]
    flags: Tuple[str, ...] = ()

    @property
    def one_shot_success(self) -> bool:
        return bool(self.attempts) and self.attempts[0].outcome == "success"

    @property
    def final_success(self) -> bool:
        return any(a.outcome == "success" for a in self.attempts)

    @property
    def total_prompt_tokens(self) -> int:
        return sum(a.prompt_tokens for a in self.attempts)

    @property
    def total_completion_tokens(self) -> int:
        return sum(a.completion_tokens for a in self.attempts)


@dataclass
class RunResult:
    model: str
    run_index: int
    case_results: List[CaseResult]

    def metrics(self, cases: Sequence[str] = CASE_NAMES,
                tracks: Sequence[str] = TRACKS) -> Dict[str, dict]:
        return compute_run_metrics(self.case_results, cases, tracks)


def _decode_output(content: str, track: str):
    """Raw model output -> Value, or raises with a repair-worthy message."""
    if track == "T":
        block = extract_toon_block(content)
        return parse_toon(block).root
    text = content.strip()
    if text.startswith("```"):
        # tolerate a fenced JSON answer: take the fence body
        lines = text.split("\n")
        closing = len(lines) - 1
        while closing > 0 and lines[closing].strip() != "```":
            closing -= 1
        text = "\n".join(lines[1:closing if closing > 0 else len(lines)])
    return parse_json(text)


def _attempt_outcome(content: str, case: CaseSpec, track: str):
    """Classify one model response: (outcome, error_text)."""
    try:
        value = _decode_output(content, track)
    except (ToonError, JsonParseError) as e:
        return "decode_error", str(e)
    errors = validate(value, case.schema)
    if errors:
        return "validation_error", "\n".join(str(e) for e in errors)
    ok, diff = deep_equal(case.gold, value)
    if ok:
        return "success", ""
    kind = diff.kind.replace("-", " ")
    return "mismatch", f"value at {format_path(diff.segments)} is wrong ({kind})"


def run_case(client, model: str, case: CaseSpec, track: str,
             max_repairs: int = MAX_REPAIRS,
             template_dir: Optional[str] = None) -> CaseResult:
    attempts: List[AttemptRecord] = []
    flags: set = set()
    prev_output = ""
    prev_error = ""
    for attempt_index in range(1, max_repairs + 2):
        if attempt_index == 1:
            prompt = render_prompt(case, track, template_dir)
        else:
            prompt = render_repair_prompt(case, track, prev_output, prev_error,
                                          template_dir)
        req = ChatRequest(model=model, messages=(("user", prompt),),
                          temperature=0.0,
                          response_format="json_object" if track == "JSO" else None)
        try:
            resp = client.complete(req)
        except (TransportError, ApiError) as e:
            # a transport failure consumes the attempt (transient retries
            # already happened inside the client, before any usage existed)
            attempts.append(AttemptRecord(attempt_index, "transport_error",
                                          0, 0, "", f"transport failure: {e}"))
            prev_output, prev_error = "", f"transport failure: {e}"
            continue
        if resp.usage_estimated:
            flags.add("estimated_usage")
        outcome, error_text = _attempt_outcome(resp.content, case, track)
        attempts.append(AttemptRecord(attempt_index, outcome,
                                      resp.prompt_tokens,
                                      resp.completion_tokens,
                                      resp.content, error_text))
        if outcome == "success":
            break
        prev_output, prev_error = resp.content, error_text
    if all(a.outcome == "transport_error" for a in attempts):
        flags.add("all_transport")  # no real model output; the cell is invalid
    return CaseResult(model, case.name, track, attempts, tuple(sorted(flags)))


def compute_run_metrics(case_results: Sequence[CaseResult],
                        cases: Sequence[str] = CASE_NAMES,
                        tracks: Sequence[str] = TRACKS) -> Dict[str, dict]:
    """Per-track one-shot accuracy, final accuracy, and the absolute token
    sum across the run's cases."""
    by_cell = {(r.case, r.track): r for r in case_results}
    out: Dict[str, dict] = {}
    for track in tracks:
        one_shot = final = tokens = 0
        for case in cases:
            r = by_cell.get((case, track))
            if r is None:
                raise MissingCase(f"no result for case {case!r} on track {track!r}")
            one_shot += r.one_shot_success
            final += r.final_success
            tokens += r.total_prompt_tokens + r.total_completion_tokens
        out[track] = {"one_shot": one_shot / len(cases),
                      "final": final / len(cases),
                      "tokens": tokens}
    return out


# -- built-in gold-oracle mock provider --------------------------------------


class GoldOracleClient:
    """Deterministic offline provider: recognizes which case and track a
    prompt belongs to and answers with the gold payload, with usage set to
    the byte-length estimate.  Used for dry runs and determinism checks."""

    def __init__(self, cases: Optional[Sequence[CaseSpec]] = None):
        self._cases = list(cases) if cases is not None else builtin_cases()

    def complete(self, req: ChatRequest) -> ChatResponse:
        prompt = req.messages[-1][1]
        case = None
        for cs in self._cases:
            markers = (cs.task_body.split("\n", 1)[0],
                       cs.toon_task_body.split("\n", 1)[0])
            if any(m in prompt for m in markers):
                case = cs
                break
        if case is None:
            raise ApiError(400, "prompt does not match any known case")
        if "STRICTLY in TOON format" in prompt:
            content = "```toon\n" + encode_toon(case.gold) + "```\n"
        else:
            content = emit_canonical_json(case.gold)
        return ChatResponse(content, estimate_tokens(prompt),
                            estimate_tokens(content))


def make_client(config: dict):
    provider = config.get("provider", "http")
    if provider == "mock":
        return GoldOracleClient()
    if provider == "http":
        from .client import HttpClient
        endpoint = config.get("endpoint")
        if not endpoint:
            raise ConfigError("http provider requires an 'endpoint'")
        return HttpClient(endpoint,
                          api_key_env=config.get("api_key_env", "TOONBENCH_API_KEY"),
                          timeout=float(config.get("timeout", 120.0)),
                          retries=int(config.get("retries", 3)))
    raise ConfigError(f"unknown provider {provider!r}")


# -- full benchmark ----------------------------------------------------------


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    except ValueError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}")
    if not isinstance(config, dict):
        raise ConfigError("config root must be an object")
    return config


def _validate_config(config: dict) -> dict:
    models = config.get("models")
    if not isinstance(models, list) or not models or \
            not all(isinstance(m, str) for m in models):
        raise ConfigError("'models' must be a non-empty list of model names")
    runs = config.get("runs", 10)
    if not isinstance(runs, int) or runs < 1:
        raise ConfigError("'runs' must be a positive integer")
    tracks = config.get("tracks", list(TRACKS))
    if not all(t in TRACKS for t in tracks) or not tracks:
        raise ConfigError(f"'tracks' entries must be among {TRACKS}")
    case_names = config.get("cases", list(CASE_NAMES))
    known = {c.name: c for c in builtin_cases()}
    unknown = [c for c in case_names if c not in known]
    if unknown or not case_names:
        raise ConfigError(f"unknown cases: {unknown}")
    max_repairs = config.get("max_repairs", MAX_REPAIRS)
    if not isinstance(max_repairs, int) or max_repairs < 0:
        raise ConfigError("'max_repairs' must be a non-negative integer")
    parallelism = config.get("parallelism", 1)
    if not isinstance(parallelism, int) or parallelism < 1:
        raise ConfigError("'parallelism' must be a positive integer")
    return {"models": models, "runs": runs, "tracks": list(tracks),
            "cases": [known[c] for c in case_names],
            "max_repairs": max_repairs, "parallelism": parallelism,
            "template_dir": config.get("template_dir")}


def _existing_cells(csv_path: Path) -> set:
    cells = set()
    if csv_path.exists():
        with open(csv_path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                cells.add((row["model"], int(row["run_index"]), row["case"],
                           row["track"]))
    return cells


def _csv_row(run_index: int, r: CaseResult) -> dict:
    return {"model": r.model, "run_index": run_index, "case": r.case,
            "track": r.track,
            "one_shot_success": int(r.one_shot_success),
            "final_success": int(r.final_success),
            "attempts": len(r.attempts),
            "prompt_tokens": r.total_prompt_tokens,
            "completion_tokens": r.total_completion_tokens,
            "flags": ";".join(r.flags)}


def run_benchmark(config: dict, out_csv, attempt_log=None,
                  client=None) -> List[RunResult]:
    """Execute every model × run × case × track cell, streaming case rows to
    ``out_csv`` as they finish and rewriting the file in deterministic order
    at the end.  Cells already present in an existing CSV are skipped."""
    cfg = _validate_config(config)
    if client is None:
        client = make_client(config)
    out_csv = Path(out_csv)
    done = _existing_cells(out_csv)
    existing_rows = []
    if out_csv.exists():
        with open(out_csv, newline="", encoding="utf-8") as f:
            existing_rows = list(csv.DictReader(f))

    cells = [(model, run, case, track)
             for model in cfg["models"]
             for run in range(1, cfg["runs"] + 1)
             for case in cfg["cases"]
             for track in cfg["tracks"]
             if (model, run, case.name, track) not in done]

    lock = threading.Lock()
    new_rows: List[dict] = []
    attempt_lines: List[str] = []
    results: Dict[Tuple[str, int], List[CaseResult]] = {}

    stream = open(out_csv, "a", newline="", encoding="utf-8")
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
    if not existing_rows:
        writer.writeheader()

    def work(cell):
        model, run, case, track = cell
        r = run_case(client, model, case, track, cfg["max_repairs"],
                     cfg["template_dir"])
        with lock:
            results.setdefault((model, run), []).append(r)
            row = _csv_row(run, r)
            new_rows.append(row)
            writer.writerow(row)  # incremental flush for resumability
            stream.flush()
            for a in r.attempts:
                attempt_lines.append(json.dumps(
                    {"model": model, "run_index": run, "case": case.name,
                     "track": track, "attempt_index": a.attempt_index,
                     "outcome": a.outcome, "prompt_tokens": a.prompt_tokens,
                     "completion_tokens": a.completion_tokens,
                     "raw_output": a.raw_output, "error_text": a.error_text},
                    sort_keys=True))
        return r

    try:
        if cfg["parallelism"] > 1:
            with ThreadPoolExecutor(max_workers=cfg["parallelism"]) as pool:
                list(pool.map(work, cells))
        else:
            for cell in cells:
                work(cell)
    finally:
        stream.close()

    # deterministic final ordering regardless of execution interleaving
    all_rows = existing_rows + new_rows
    all_rows.sort(key=lambda r: (r["model"], int(r["run_index"]), r["case"],
                                 r["track"]))
    with open(out_csv, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in all_rows:
            w.writerow(row)

    if attempt_log is not None:
        attempt_lines.sort()
        with open(attempt_log, "a", encoding="utf-8") as f:
            for line in attempt_lines:
                f.write(line + "\n")

    run_results = [RunResult(model, run, rs)
                   for (model, run), rs in sorted(results.items())]
    return run_results
