"""OR-parallel scheduler with independent AND-parallelism.

Every branch point forks tasks; each task owns a private binding store.
Workers take tasks round-robin from one queue and run each for a bounded
slice before requeueing it, so no branch starves while another diverges.

A conjunction whose conjuncts share no unbound variable is split: each
conjunct runs as its own sub-search and a join combines the answer lists
in order once every sub-search has drained.
"""

from __future__ import annotations

import itertools
import os
import queue
import threading
from collections import deque

from .engine import BindingStore, normalize
from .solver import GOAL, PRUNED, ZERO_PATH, DepthExceeded, Stats, make_solution
from .syntax import And, free_vars
from .terms import term_vars

__all__ = ["run_parallel", "SLICE"]

SLICE = 64
_DONE = object()


class _Group:
    """The tasks whose successes are delivered to one place."""

    __slots__ = ("live", "on_success", "on_pruned", "on_drained")

    def __init__(self, on_success, on_pruned, on_drained):
        self.live = 0
        self.on_success = on_success
        self.on_pruned = on_pruned
        self.on_drained = on_drained


class _Task:
    __slots__ = ("cont", "store", "path", "group")

    def __init__(self, cont, store, path, group):
        self.cont = cont
        self.store = store
        self.path = path
        self.group = group


class _Join:
    """Recombines the answers of independently solved conjuncts."""

    def __init__(self, pool, parent: _Task, rest, conj_vars):
        self.pool = pool
        self.parent = parent
        self.rest = rest
        self.conj_vars = conj_vars
        n = len(conj_vars)
        self.answers = [[] for _ in range(n)]
        self.pruned = [None] * n
        self.remaining = n

    def group_for(self, k):
        def success(task):
            terms = tuple(task.store.resolve(v) for v in self.conj_vars[k])
            self.answers[k].append((terms, task.path))

        def pruned(marker):
            if self.pruned[k] is None:
                self.pruned[k] = marker

        return _Group(success, pruned, lambda: self.slot_drained())

    def slot_drained(self):
        # called with the pool lock held
        self.remaining -= 1
        if self.remaining:
            return
        parent, pool = self.parent, self.pool
        group = parent.group
        # report incompleteness exactly where a left-to-right run would reach it
        for k, marker in enumerate(self.pruned):
            if marker is not None:
                group.on_pruned(marker)
            if not self.answers[k]:
                break
        for combo in itertools.product(*self.answers):
            store = parent.store.copy()
            m, s, d = parent.path
            for vars, (terms, path) in zip(self.conj_vars, combo):
                for v, t in zip(vars, terms):
                    if not (t is v or t == v):
                        store.bind(v, t)
                m, s, d = m + path[0], s + path[1], max(d, path[2])
            pool.add(_Task(self.rest, store, (m, s, d), group))
        pool.release(group)


class _Pool:
    def __init__(self, search, workers: int):
        self.search = search
        self.workers = workers
        self.lock = threading.Condition()
        self.tasks: deque[_Task] = deque()
        self.out: queue.Queue = queue.Queue()
        self.live = 0
        self.max_width = 0
        self.cancelled = False
        self.finished = False
        self.stats: list[Stats] = []
        trace = search.trace
        if trace is not None:
            trace_lock = threading.Lock()

            def trace(line, _inner=search.trace):
                with trace_lock:
                    _inner(line)
        self.trace = trace

    # the helpers below expect the lock to be held

    def add(self, task: _Task):
        task.group.live += 1
        self.live += 1
        self.max_width = max(self.max_width, self.live)
        self.tasks.append(task)
        self.lock.notify()

    def release(self, group: _Group):
        group.live -= 1
        if group.live == 0:
            group.on_drained()

    def retire(self, task: _Task):
        self.live -= 1
        self.release(task.group)

    # ------------------------------------------------------------------

    def worker(self):
        machine = self.search.machine(self.trace)
        try:
            while True:
                with self.lock:
                    while not self.tasks and not (self.finished or self.cancelled):
                        self.lock.wait()
                    if self.finished or self.cancelled:
                        return
                    task = self.tasks.popleft()
                self.run(machine, task)
        except BaseException as exc:  # surfaced to the consumer
            with self.lock:
                self.cancelled = True
                self.lock.notify_all()
            self.out.put(exc)
        finally:
            with self.lock:
                self.stats.append(machine.stats)

    def run(self, machine, task: _Task):
        for _ in range(SLICE):
            if self.cancelled:
                return
            if task.cont is None:
                with self.lock:
                    task.group.on_success(task)
                    self.retire(task)
                return
            frame, rest = task.cont
            if frame[0] == GOAL and type(frame[1]) is And and self.try_split(machine, task, frame, rest):
                return
            out = machine.step(frame, rest, task.store, task.path)
            if out is PRUNED:
                marker = DepthExceeded(normalize(frame[1].term, task.store), frame[2] + 1)
                with self.lock:
                    task.group.on_pruned(marker)
                    self.retire(task)
                return
            if not out:
                with self.lock:
                    self.retire(task)
                return
            if len(out) > 1:
                with self.lock:
                    for cont, path in out[1:]:
                        self.add(_Task(cont, task.store.copy(), path, task.group))
            task.cont, task.path = out[0]
        with self.lock:
            # slice used up: back of the queue
            self.tasks.append(task)
            self.lock.notify()

    def try_split(self, machine, task: _Task, frame, rest) -> bool:
        goals = frame[1].goals
        store = task.store
        conj_vars = []
        seen: set = set()
        for g in goals:
            unbound = {}
            for v in free_vars(g):
                for u in term_vars(store.resolve(v)):
                    unbound.setdefault(u, None)
            if seen.intersection(unbound):
                return False
            seen.update(unbound)
            conj_vars.append(tuple(unbound))
        # same accounting as the sequential rule-8 step
        out = machine.step(frame, rest, store, task.path)
        (_, path), = out
        depth = frame[2]
        with self.lock:
            task.path = path
            join = _Join(self, task, rest, conj_vars)
            for k, g in enumerate(goals):
                self.add(_Task(((GOAL, g, depth), None), store.copy(), ZERO_PATH, join.group_for(k)))
            # the parent task's hold on its group passes to the join
            self.live -= 1
        return True


def run_parallel(search):
    """Event stream for the parallel scheduler; see :class:`macrolog.solver.Search`."""
    workers = search.workers or os.cpu_count() or 2
    if workers < 1:
        raise ValueError("workers must be at least 1")
    pool = _Pool(search, workers)
    query = search.query

    def top_drained():
        pool.finished = True
        pool.lock.notify_all()
        pool.out.put(_DONE)

    top = _Group(
        lambda task: pool.out.put(make_solution(query, task.store, task.path)),
        pool.out.put,
        top_drained,
    )
    with pool.lock:
        pool.add(_Task(((GOAL, query.goal, 0), None), BindingStore(), ZERO_PATH, top))
    threads = [threading.Thread(target=pool.worker, daemon=True, name=f"macrolog-{i}")
               for i in range(workers)]
    for t in threads:
        t.start()
    try:
        while True:
            item = pool.out.get()
            if item is _DONE:
                break
            if isinstance(item, BaseException):
                raise item
            yield item
    finally:
        with pool.lock:
            pool.cancelled = True
            pool.lock.notify_all()
        for t in threads:
            t.join()
        total = Stats()
        for st in pool.stats:
            total = total.merge(st)
        total.max_width = pool.max_width
        total.depth = search.stats.depth
        search.stats.micro_steps = total.micro_steps
        search.stats.synthetic_steps = total.synthetic_steps
        search.stats.max_width = total.max_width
        search.stats.rules = total.rules
