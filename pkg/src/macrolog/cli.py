"""Command-line front end: run files, an interactive REPL, tracing and desugaring tools."""

from __future__ import annotations

import argparse
import os
import sys
import threading
from dataclasses import dataclass, replace

from .desugar import desugar
from .parser import ParseError, parse_goal, parse_program
from .pretty import pretty
from .solver import (
    DepthExceeded, Limits, Query, Scheduler, Search, Solution, answer_multiset,
)
from .syntax import Program

__all__ = ["Config", "run_file", "repl", "main"]


@dataclass
class Config:
    scheduler: Scheduler = Scheduler.SEQ
    max_depth: int = 256
    # None means all answers; files default to the first answer, the REPL to on-demand
    max_solutions: int | None = 1
    occurs_check: bool = True
    trace: bool = False
    stats: bool = False
    workers: int = os.cpu_count() or 1

    def __post_init__(self):
        self.scheduler = Scheduler(self.scheduler)
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


class Console:
    """Serializes all output, including trace lines from parallel workers."""

    def __init__(self, out, err):
        self.out = out
        self.err = err
        self._lock = threading.Lock()

    def print(self, *lines):
        with self._lock:
            for line in lines:
                self.out.write(line + "\n")
            self.out.flush()

    def error(self, line):
        with self._lock:
            self.err.write(line + "\n")
            self.err.flush()


def _search(program: Program, goal, config: Config, console: Console, max_solutions) -> Search:
    trace = console.error if config.trace else None
    return Search(program, Query.of(goal), config.scheduler,
                  Limits(config.max_depth, max_solutions),
                  occurs_check=config.occurs_check, trace=trace, workers=config.workers)


def _answer_lines(sol: Solution) -> list[str]:
    return sol.render() or ["true"]


def _run_directive(program, goal, config, console) -> bool:
    search = _search(program, goal, config, console, config.max_solutions)
    found = 0
    truncated = None
    for ev in search:
        if isinstance(ev, DepthExceeded):
            truncated = truncated or ev
            continue
        if found:
            console.print(";")
        console.print(*_answer_lines(ev))
        found += 1
    if not found:
        console.print("false")
    if truncated is not None:
        console.error(f"% search cut off at depth {config.max_depth}; answers may be incomplete")
    if config.stats:
        console.print(f"% stats: {search.stats.summary()}")
    return found > 0


def _compare(program, goal, config, console):
    console.print(f"?- {pretty(goal)}.")
    micro_prog, micro_goal = desugar(program), desugar(goal)
    results = []
    for label, prog, g in (("macro", program, goal), ("micro", micro_prog, micro_goal)):
        search = _search(prog, g, config, console, config.max_solutions)
        sols = list(search.solutions())
        results.append(answer_multiset(sols))
        answers = " | ".join(", ".join(_answer_lines(s)) for s in sols) or "false"
        flag = "" if search.complete else " (incomplete)"
        console.print(f"  {label}: {answers}{flag}",
                      f"  {label} stats: {search.stats.summary()}")
    console.print(f"  same answers: {'yes' if results[0] == results[1] else 'no'}")
    return bool(results[0])


def run_file(path, config: Config, out=None, err=None, *, desugar_only=False,
             compare=False) -> int:
    """Load ``path`` and run its ``?-`` directives.

    Exit status: 0 if every directive had an answer, 1 if some had none,
    2 when the file cannot be read or parsed.
    """
    console = Console(out or sys.stdout, err or sys.stderr)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        console.error(f"error: cannot read {path}: {exc.strerror}")
        return 2
    try:
        program = parse_program(text)
    except ParseError as exc:
        console.error(f"error: {path}: {exc}")
        return 2
    if desugar_only:
        micro = desugar(program)
        if micro.clauses or micro.queries:
            console.print(pretty(micro))
        return 0
    clauses = Program(program.clauses)
    status = 0
    for goal in program.queries:
        ok = (_compare(clauses, goal, config, console) if compare
              else _run_directive(clauses, goal, config, console))
        if not ok:
            status = 1
    return status


REPL_HELP = """\
Enter a goal to run it; after each answer type ; for the next one or press Enter to stop.
  :load <path>            add the clauses of a file
  :desugar <goal>         print the micro form of a goal
  :stats on|off           print search statistics after each query
  :scheduler seq|par      choose the scheduler
  :quit                   leave"""


def repl(config: Config, stdin=None, out=None, err=None) -> int:
    stdin = stdin or sys.stdin
    console = Console(out or sys.stdout, err or sys.stderr)
    config = replace(config, max_solutions=None)
    interactive = stdin.isatty()
    clauses: list = []

    def read(prompt):
        if interactive:
            console.out.write(prompt)
            console.out.flush()
        line = stdin.readline()
        return None if line == "" else line.rstrip("\n")

    while True:
        line = read("?- ")
        if line is None:
            return 0
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith(":"):
            cmd, _, arg = line[1:].partition(" ")
            arg = arg.strip()
            if cmd in ("quit", "q", "halt"):
                return 0
            try:
                _meta(cmd, arg, config, clauses, console)
            except (ParseError, OSError, ValueError) as exc:
                console.error(f"error: {exc}")
            continue
        try:
            goal = parse_goal(line)
        except ParseError as exc:
            console.error(f"error: {exc}")
            continue
        search = _search(Program(tuple(clauses)), goal, config, console, None)
        events = iter(search)
        try:
            while True:
                sol = next((ev for ev in events if isinstance(ev, Solution)), None)
                if sol is None:
                    console.print("false")
                    if not search.complete:
                        console.error(f"% search cut off at depth {config.max_depth}")
                    break
                console.print(*_answer_lines(sol))
                reply = read("")
                if reply is None or reply.strip() != ";":
                    break
        finally:
            events.close()
        if config.stats:
            console.print(f"% stats: {search.stats.summary()}")


def _meta(cmd, arg, config: Config, clauses: list, console: Console):
    if cmd == "load":
        with open(arg, encoding="utf-8") as fh:
            program = parse_program(fh.read())
        clauses.extend(program.clauses)
        console.print(f"% loaded {len(program.clauses)} clauses from {arg}")
    elif cmd == "desugar":
        console.print(pretty(desugar(parse_goal(arg))))
    elif cmd == "stats":
        if arg not in ("on", "off"):
            raise ValueError(":stats takes on or off")
        config.stats = arg == "on"
    elif cmd == "scheduler":
        config.scheduler = Scheduler(arg)
    elif cmd == "help":
        console.print(REPL_HELP)
    else:
        raise ValueError(f"unknown command :{cmd} (try :help)")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _solutions(text):
    return None if text == "all" else _positive(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="macrolog",
        description="Logic programs with n-ary connectives and block quantifiers.")
    p.add_argument("file", nargs="?", help="program to load; omit for the REPL")
    p.add_argument("--scheduler", choices=["seq", "par"], default="seq")
    p.add_argument("--workers", type=_positive, default=os.cpu_count() or 1,
                   help="worker threads for --scheduler=par")
    p.add_argument("--depth", type=_positive, default=256, help="maximum resolution depth")
    p.add_argument("--max-solutions", type=_solutions, default=1, metavar="N|all",
                   help="answers per directive when running a file (default 1)")
    p.add_argument("--no-occurs-check", dest="occurs_check", action="store_false")
    p.add_argument("--trace", action="store_true", help="print one line per rule firing to stderr")
    p.add_argument("--stats", action="store_true", help="print search statistics")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--desugar", action="store_true",
                      help="print the micro form of the program and exit")
    mode.add_argument("--compare", action="store_true",
                      help="run each directive on the macro and micro forms side by side")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = Config(args.scheduler, args.depth, args.max_solutions, args.occurs_check,
                    args.trace, args.stats, args.workers)
    if args.file is None:
        if args.desugar or args.compare:
            build_parser().error("--desugar and --compare need a file")
        return repl(config)
    return run_file(args.file, config, desugar_only=args.desugar, compare=args.compare)


if __name__ == "__main__":
    sys.exit(main())
