"""Command-line driver: ``check``, ``run``, ``emit`` and ``dump``.

Exit codes of ``check``: 0 no violation within the bound, 1 assertion
violation found, 2 search budget exhausted, 3 usage or input error.
Options are resolved as command-line flags, then the JSON file named by
``SOLIDCHECK_CONFIG``, then built-in defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from . import ast as A
from .errors import ReplayDivergence, ScriptError, SolidError
from .explicate import explicate
from .explorer import (
    EXIT_CODES, ERROR_FOUND, NO_VIOLATION, HarnessConfig, explore, explore_parallel, replay,
)
from .printer import print_program as print_solid
from .semantics import (
    ChainState, CreateAddress, CreateContractTx, CurrencyTransfer, Cursor, ExecuteContract, Interpreter,
    MintBlock, SemanticsConfig, apply_transaction,
)
from .semantics.choices import decode, encode
from .semantics.state import address_cell_json
from .semantics.values import EnumV, to_json
from .typecheck import frontend
from .types import UINT_MAX, EnumType

SCHEMA = "solidcheck.report/1"
CONFIG_ENV = "SOLIDCHECK_CONFIG"
USAGE_ERROR = 3

DEFAULTS: Dict[str, Any] = {
    "harness": "contract",
    "bound": 4,
    "domain": [0, 1, 2, UINT_MAX],
    "addresses": 4,
    "step_budget": 10_000,
    "call_depth": 2,
    "length_cap": 3,
    "jobs": 1,
}
PROVED_NOTE = ("bounded exploration cannot prove the absence of violations; "
               "no violation exists within the configured bounds")


class UsageError(Exception):
    pass


# -- helpers ------------------------------------------------------------------------------


def parse_domain(text: Any) -> List[int]:
    if isinstance(text, list):
        items = text
    else:
        items = [x.strip() for x in str(text).split(",") if x.strip()]
    try:
        values = [int(x, 0) if isinstance(x, str) else int(x) for x in items]
    except ValueError:
        raise UsageError(f"bad --domain value {text!r}: expected comma-separated integers")
    if not values:
        raise UsageError("--domain must list at least one value")
    return values


def load_config() -> Dict[str, Any]:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace, names: Sequence[str], defaults: Optional[Dict[str, Any]] = None
            ) -> Dict[str, Any]:
    """Flag value if given, else config file value, else default."""
    config = load_config()
    defaults = {**DEFAULTS, **(defaults or {})}
    out = {}
    for name in names:
        flag = getattr(args, name, None)
        if flag is not None:
            out[name] = flag
        elif name in config:
            out[name] = config[name]
        else:
            out[name] = defaults.get(name)
    return out


def read_source(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def load_program(path: str):
    source = read_source(path)
    return source, explicate(frontend(source))


def pick_contract(program: A.Program, name: Optional[str]) -> str:
    names = [c.name for c in program.contracts]
    if not names:
        raise UsageError("the input declares no contract")
    if name is None:
        return names[-1]
    if name not in names:
        raise UsageError(f"unknown contract {name!r} (declared: {', '.join(names)})")
    return name


def emit_json(obj: Any, out=None) -> None:
    out = out or sys.stdout
    json.dump(obj, out, indent=2, sort_keys=True)
    out.write("\n")


# -- check -----------------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    opts = resolve(args, ["harness", "function", "bound", "domain", "addresses", "step_budget", "call_depth",
                          "length_cap", "jobs", "contract"])
    if opts["harness"] == "function" and not opts["function"]:
        raise UsageError("--harness function requires --function NAME")
    if opts["addresses"] < 3:
        raise UsageError("--addresses must be at least 3")
    source, program = load_program(args.file)
    contract = pick_contract(program, opts["contract"])
    cfg = HarnessConfig(
        contract=contract, kind=opts["harness"], function=opts["function"] if opts["harness"] == "function" else None,
        tx_bound=opts["bound"], value_domain=tuple(parse_domain(opts["domain"])),
        address_universe=tuple(range(1, opts["addresses"] + 1)), step_budget=opts["step_budget"],
        call_depth=opts["call_depth"], length_cap=opts["length_cap"],
    )
    cfg.validate()
    trace = explore_parallel(program, cfg, opts["jobs"]) if opts["jobs"] > 1 else explore(program, cfg)
    replayed = None
    if trace.verdict == ERROR_FOUND:
        try:
            replay(program, cfg, trace)
            replayed = True
        except ReplayDivergence:
            replayed = False
    code = EXIT_CODES[trace.verdict]
    report = {
        "schema": SCHEMA,
        "command": {"name": "check", "file": args.file, "contract": contract, "harness": cfg.kind,
                    "function": cfg.function, "bound": cfg.tx_bound, "domain": [encode(v) for v in cfg.value_domain],
                    "addresses": list(cfg.address_universe), "stepBudget": cfg.step_budget,
                    "callDepth": cfg.call_depth},
        "input": {"file": args.file, "digest": digest(source)},
        "exitCode": code,
        **trace.to_json(),
    }
    if replayed is not None:
        report["replayConfirmed"] = replayed
    if trace.verdict == NO_VIOLATION:
        report["note"] = PROVED_NOTE
    if args.json:
        emit_json(report)
    else:
        print(f"{trace.verdict} ({contract}, {cfg.kind} harness, bound {cfg.tx_bound})")
        for line in trace.lines():
            print(line)
        if trace.site is not None:
            c, f, line = trace.site
            print(f"assertion violated in {c}.{f} at line {line}")
        if replayed is not None:
            print("replay: " + ("confirmed" if replayed else "DIVERGED"))
        if "note" in report:
            print("note: " + report["note"])
        st = trace.stats
        print(f"states explored: {st['statesExplored']}, pruned: {st['pruned']}, time: {st['elapsedMs']} ms")
    return code


# -- run ---------------------------------------------------------------------------------------


def _arg_value(v: Any, t) -> Any:
    v = decode(v)
    if isinstance(t, EnumType):
        if isinstance(v, int) and not isinstance(v, bool):
            return EnumV(t.name, v)
        if isinstance(v, str):
            return EnumV(t.name, v)
    return v


def _enum_args(interp: Interpreter, f: Optional[A.Function], raw: List[Any]) -> tuple:
    params = f.params if f is not None else []
    if len(raw) != len(params):
        raise ScriptError(f"{'constructor' if f is None or f.is_constructor else f.name} expects "
                          f"{len(params)} arguments, {len(raw)} given")
    out = []
    for v, p in zip(raw, params):
        x = _arg_value(v, p.type)
        if isinstance(x, EnumV) and isinstance(x.index, str):
            values = interp.info.enums[x.enum].values
            name = x.index.split(".")[-1]
            if name not in values:
                raise ScriptError(f"{x.index!r} is not a member of {x.enum}")
            x = EnumV(x.enum, values.index(name))
        out.append(x)
    return tuple(out)


def build_tx(interp: Interpreter, cs: ChainState, j: Dict[str, Any]):
    try:
        kind = j["kind"]
        if kind == "CreateAddress":
            return CreateAddress(int(decode(j.get("value", 0))))
        if kind == "CurrencyTransfer":
            return CurrencyTransfer(int(j["src"]), int(j["dest"]), int(decode(j["value"])))
        if kind == "MintBlock":
            return MintBlock(int(decode(j["time"])))
        if kind == "CreateContract":
            contract = interp.info.contracts.get(j["contract"])
            if contract is None:
                raise ScriptError(f"unknown contract {j['contract']!r}")
            args = _enum_args(interp, contract.constructor, j.get("args", []))
            return CreateContractTx(int(j["src"]), contract.name, args, int(decode(j.get("value", 0))))
        if kind == "ExecuteContract":
            dest = int(j["dest"])
            cname = j.get("contract") or cs.cell(dest).type
            contract = interp.info.contracts.get(cname)
            f = None
            if contract is not None:
                f = next((g for g in contract.interface if g.name == j["function"]), None)
            args = _enum_args(interp, f, j.get("args", [])) if f is not None else tuple(decode(a) for a in j.get("args", []))
            return ExecuteContract(int(j["src"]), dest, cname, j["function"], args, int(decode(j.get("value", 0))))
    except KeyError as exc:
        raise ScriptError(f"transaction {j!r} lacks field {exc.args[0]!r}")
    except (TypeError, ValueError) as exc:
        raise ScriptError(f"malformed transaction {j!r}: {exc}")
    raise ScriptError(f"unknown transaction kind {j.get('kind')!r}")


def chain_json(interp: Interpreter, cs: ChainState) -> Dict[str, Any]:
    return {"time": to_json(cs.time),
            "addresses": [address_cell_json(interp.info, a, cs.s[a]) for a in sorted(cs.s.keys())]}


def cmd_run(args: argparse.Namespace) -> int:
    # scripts create their own addresses, so they get a larger universe
    opts = resolve(args, ["domain", "addresses", "step_budget", "length_cap"], {"addresses": 8})
    source, program = load_program(args.file)
    try:
        with open(args.script) as fh:
            script = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.script}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise ScriptError(f"script is not valid JSON: {exc}")
    if isinstance(script, dict):
        script = script.get("transactions")
    if not isinstance(script, list):
        raise ScriptError("script must be a list of transactions or an object with a 'transactions' list")
    addresses = opts["addresses"]
    config = SemanticsConfig(value_domain=tuple(parse_domain(opts["domain"])),
                             address_universe=tuple(range(1, addresses + 1)),
                             step_budget=opts["step_budget"], length_cap=opts["length_cap"])
    interp = Interpreter(program, config)
    cs = ChainState()
    results = []
    t0 = time.perf_counter()
    for k, j in enumerate(script):
        if not isinstance(j, dict):
            raise ScriptError(f"transaction {k} is not an object")
        tx = build_tx(interp, cs, j)
        pinned = [decode(c) for c in j.get("choices", [])] or None
        outcome = next(iter(apply_transaction(interp, cs, tx, Cursor(pinned))), None)
        if outcome is None:
            results.append({"index": k, "status": "invalid", "reason": "pinned choices admit no execution"})
            continue
        entry: Dict[str, Any] = {"index": k, "kind": j["kind"], "status": outcome.status,
                                 "choices": [encode(c) for c in outcome.choices]}
        if outcome.address is not None:
            entry["address"] = outcome.address
        if outcome.final is not None:
            entry["cexprints"] = [{"name": n, "value": to_json(v), "line": line} for n, v, line in outcome.final.log]
            if outcome.status == "error":
                c, f, line = outcome.final.site
                entry["site"] = {"contract": c, "function": f, "line": line}
        results.append(entry)
        cs = outcome.chain
    report = {
        "schema": SCHEMA,
        "command": {"name": "run", "file": args.file, "script": args.script},
        "input": {"file": args.file, "digest": digest(source)},
        "transactions": results,
        "final": chain_json(interp, cs),
        "stats": {"elapsedMs": int((time.perf_counter() - t0) * 1000)},
    }
    emit_json(report)
    return 0


# -- emit / dump -----------------------------------------------------------------------------


def cmd_emit(args: argparse.Namespace) -> int:
    from .ivl import emit_program, print_program
    from .ivl.desugar import desugar

    opts = resolve(args, ["harness", "function", "contract"])
    if opts["harness"] == "function" and not opts["function"]:
        raise UsageError("--harness function requires --function NAME")
    _, program = load_program(args.file)
    contract = pick_contract(program, opts["contract"])
    ivl = emit_program(program, contract, opts["harness"], opts["function"] if opts["harness"] == "function" else None)
    if args.desugar_ivl:
        ivl = desugar(ivl)
    text = print_program(ivl, "boogie")
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def ast_json(node: Any) -> Any:
    """Node kind, fields and source span of a syntax tree, as JSON."""
    if isinstance(node, list):
        return [ast_json(x) for x in node]
    if isinstance(node, A.Node):
        out: Dict[str, Any] = {"kind": type(node).__name__}
        for f in dataclasses.fields(node):
            if f.name in ("span", "ty", "loc", "tags"):
                continue
            out[f.name] = ast_json(getattr(node, f.name))
        if node.span is not None:
            out["span"] = {"line": node.span.line, "col": node.span.col}
        return out
    if node is None or isinstance(node, (bool, int, str)):
        return node
    return str(node)


def cmd_dump(args: argparse.Namespace) -> int:
    source = read_source(args.file)
    typed = frontend(source)
    if args.stage == "ast":
        emit_json(ast_json(typed))
    else:
        sys.stdout.write(print_solid(explicate(typed)))
    return 0


# -- entry point ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="solidcheck", description="Bounded checking of Solidity-subset contracts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def harness_flags(sp):
        sp.add_argument("--contract", help="contract to check (default: the last one declared)")
        sp.add_argument("--harness", choices=["contract", "function"])
        sp.add_argument("--function", help="function checked by the function harness")

    c = sub.add_parser("check", help="explore the contract and report assertion violations")
    c.add_argument("file")
    harness_flags(c)
    c.add_argument("--bound", type=int, help="maximum number of calls after deployment")
    c.add_argument("--domain", help="comma-separated value domain for arguments and message values")
    c.add_argument("--addresses", type=int, help="size of the address universe (at least 3)")
    c.add_argument("--step-budget", type=int, dest="step_budget", help="maximum steps per transaction")
    c.add_argument("--call-depth", type=int, dest="call_depth", help="re-entry bound of the call stub")
    c.add_argument("--length-cap", type=int, dest="length_cap", help="largest havoc'd array length")
    c.add_argument("--jobs", type=int, help="worker processes for the search")
    c.add_argument("--json", action="store_true", help="print a JSON report")
    c.set_defaults(run=cmd_check)

    r = sub.add_parser("run", help="execute a JSON transaction script")
    r.add_argument("file")
    r.add_argument("script")
    r.add_argument("--domain")
    r.add_argument("--addresses", type=int)
    r.add_argument("--step-budget", type=int, dest="step_budget")
    r.add_argument("--length-cap", type=int, dest="length_cap")
    r.set_defaults(run=cmd_run)

    e = sub.add_parser("emit", help="write the verification-language model")
    e.add_argument("file")
    harness_flags(e)
    e.add_argument("-o", "--output")
    e.add_argument("--desugar-ivl", action="store_true", help="lower enums and records for plain Boogie")
    e.set_defaults(run=cmd_emit)

    d = sub.add_parser("dump", help="print the syntax tree or the explicated program")
    d.add_argument("file")
    d.add_argument("--stage", choices=["ast", "solid"], default="solid")
    d.set_defaults(run=cmd_dump)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.run(args)
    except (UsageError, SolidError) as exc:
        print(f"solidcheck: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
