"""The cloning challenge: Peter prepares, Alice tries to hand back two copies.

Peter prepares a particle by measuring it with one of a declared family of
single-particle measurements, gives it to Alice, and later re-measures the
two particles she returns with the same measurement. Alice passes a trial
when both outcomes equal Peter's original outcome.

Three tools live here:

* :func:`run_challenge` plays the game with sampled trials.
* :func:`search_strategies` finds the best decision-tree strategy up to a
  depth by exact probability propagation with rationals.
* :func:`failure_certificate` is the counting bound behind the no-go result:
  an outcome set that ever leaves two designated particles both equal to v
  must leave them differently in at least a quarter of its rows.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Iterator, Sequence, Union

from toylocal.core import (
    Bijection,
    Measurement,
    Mixture,
    OutcomeSet,
    find_outcome,
    posterior_mixture,
    require_valid,
    rotation,
    validate_measurement,
    validate_outcome_set,
)
from toylocal.enumeration import enumerate_valid_measurements
from toylocal.formats import bundled_measurement, frac_str, measurement_from_json, measurement_to_json
from toylocal.rng import Stream
from toylocal.spacetime import World, joint_measure, local_op, move_particle, move_particles

PETER_AT = 0
ALICE_AT = 1
DEFAULT_NODE_BUDGET = 2_000_000


class StrategyError(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


def default_preparations() -> list[Measurement]:
    return [bundled_measurement("P"), bundled_measurement("P_prime")]


# -- preparation -------------------------------------------------------------------

@dataclass(frozen=True)
class PreparationRecord:
    measurement: Measurement
    outcome: int
    ontic_state: int
    epistemic: Mixture


def peter_prepare(
    p: Measurement, rng: Stream, world: World | None = None, *, pid=1, position: int = PETER_AT
) -> PreparationRecord:
    """Draw a uniform hidden value, measure ``p`` on it and record what Peter knows."""
    require_valid(p)
    if p.num_particles != 1:
        raise ValueError("preparations are single-particle measurements")
    world = world if world is not None else World()
    world.add_particle(pid, position, rng.randbelow(4), actor="peter")
    r = joint_measure(world, p, [pid], rng, actor="peter")
    return PreparationRecord(p, r, world.register.god_view(pid), posterior_mixture(p, r))


# -- strategies -----------------------------------------------------------------------

@dataclass(frozen=True)
class Action:
    """Measure ``measurement`` on ``targets`` (column order), or apply ``bijection`` to ``targets[0]``."""

    targets: tuple[int, ...]
    measurement: Measurement | None = None
    bijection: Bijection | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if (self.measurement is None) == (self.bijection is None):
            raise StrategyError("an action is either a measurement or a bijection")

    @property
    def is_measurement(self) -> bool:
        return self.measurement is not None

    @property
    def arity(self) -> int:
        return self.measurement.R if self.measurement is not None else 1

    def describe(self) -> str:
        where = ",".join(map(str, self.targets))
        if self.measurement is not None:
            m = self.measurement
            name = m.name or "{" + "|".join("".join(str(v) for row in rows for v in row) for rows in m.outcomes) + "}"
            return f"measure {name} on ({where})"
        k = self.bijection.rotation_index
        op = f"U_{k}" if k is not None else "perm" + "".join(map(str, self.bijection.table))
        return f"{op} on {where}"

    def to_json(self) -> dict:
        if self.measurement is not None:
            return {"measure": measurement_to_json(self.measurement)}
        k = self.bijection.rotation_index
        return {"rotate": k} if k is not None else {"map": list(self.bijection.table)}


@dataclass(frozen=True)
class Leaf:
    particles: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "particles", tuple(self.particles))


@dataclass(frozen=True)
class Node:
    action: Action
    children: tuple["Tree", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))


Tree = Union[Node, Leaf]


def tree_depth(tree: Tree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(c) for c in tree.children)


def tree_to_json(tree: Tree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": list(tree.particles)}
    return {
        "node": {
            "action": tree.action.to_json(),
            "target_particles": list(tree.action.targets),
            "children_by_outcome": [tree_to_json(c) for c in tree.children],
        }
    }


def tree_from_json(obj) -> Tree:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise StrategyError(f"strategy node must be {{'leaf': ...}} or {{'node': ...}}, got {obj!r}")
    if "leaf" in obj:
        leaf = obj["leaf"]
        if not isinstance(leaf, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in leaf):
            raise StrategyError(f"leaf must list particle indices, got {leaf!r}")
        return Leaf(tuple(leaf))
    if "node" not in obj:
        raise StrategyError(f"unknown strategy entry {obj!r}")
    node = obj["node"]
    try:
        act, targets, children = node["action"], node["target_particles"], node["children_by_outcome"]
    except (KeyError, TypeError) as exc:
        raise StrategyError(f"node lacks field {exc}") from exc
    if not isinstance(targets, list) or not isinstance(children, list) or not isinstance(act, dict):
        raise StrategyError("node fields have the wrong types")
    try:
        if "measure" in act:
            action = Action(tuple(targets), measurement=measurement_from_json(act["measure"]))
        elif "rotate" in act:
            action = Action(tuple(targets), bijection=rotation(act["rotate"]))
        elif "map" in act:
            action = Action(tuple(targets), bijection=Bijection(tuple(act["map"])))
        else:
            raise StrategyError(f"unknown action {act!r}")
    except (ValueError, TypeError) as exc:
        raise StrategyError(f"bad action {act!r}: {exc}") from exc
    return Node(action, tuple(tree_from_json(c) for c in children))


@dataclass(frozen=True)
class CloningStrategy:
    """Alice's decision tree over ``num_particles`` particles.

    Particle 1 is the one Peter hands over; 2..N are Alice's ancillas.
    """

    root: Tree
    num_particles: int

    @property
    def depth(self) -> int:
        return tree_depth(self.root)

    def validate(self, copies: int = 2, max_depth: int | None = None) -> None:
        if self.num_particles < 1:
            raise StrategyError("a strategy needs at least one particle")
        if max_depth is not None and self.depth > max_depth:
            raise StrategyError(f"strategy depth {self.depth} exceeds {max_depth}")
        self._check(self.root, copies)

    def _check(self, tree: Tree, copies: int) -> None:
        n = self.num_particles
        if isinstance(tree, Leaf):
            ps = tree.particles
            if len(ps) != copies:
                raise StrategyError(f"leaf {ps} must return {copies} particle(s)")
            if len(set(ps)) != len(ps):
                raise StrategyError(f"leaf {ps} returns the same particle twice")
            if not all(1 <= p <= n for p in ps):
                raise StrategyError(f"leaf {ps} references particles outside 1..{n}")
            return
        a = tree.action
        if not a.targets or len(set(a.targets)) != len(a.targets):
            raise StrategyError(f"action targets {a.targets} must be distinct and non-empty")
        if not all(1 <= p <= n for p in a.targets):
            raise StrategyError(f"action targets {a.targets} reference particles outside 1..{n}")
        if a.measurement is not None:
            report = validate_measurement(a.measurement)
            if not report:
                raise StrategyError(f"strategy uses an invalid measurement: {report.describe()}")
            if a.measurement.num_particles != len(a.targets):
                raise StrategyError("measurement arity does not match its target particles")
        elif len(a.targets) != 1:
            raise StrategyError("a bijection acts on exactly one particle")
        if len(tree.children) != a.arity:
            raise StrategyError(f"{a.describe()} needs {a.arity} children, has {len(tree.children)}")
        for c in tree.children:
            self._check(c, copies)

    def to_json(self) -> dict:
        return {"num_particles": self.num_particles, "strategy": tree_to_json(self.root)}

    @classmethod
    def from_json(cls, obj) -> "CloningStrategy":
        if not isinstance(obj, dict) or "strategy" not in obj:
            raise StrategyError("strategy file needs 'num_particles' and 'strategy'")
        n = obj.get("num_particles")
        if isinstance(n, bool) or not isinstance(n, int):
            raise StrategyError("num_particles must be an integer")
        return cls(tree_from_json(obj["strategy"]), n)

    def describe(self) -> str:
        lines: list[str] = []

        def walk(t: Tree, indent: str, label: str) -> None:
            if isinstance(t, Leaf):
                lines.append(f"{indent}{label}return particles {t.particles}")
                return
            lines.append(f"{indent}{label}{t.action.describe()}")
            for s, c in enumerate(t.children):
                walk(c, indent + "  ", f"[{s}] " if t.action.is_measurement else "")

        walk(self.root, "", "")
        return "\n".join(lines)


def null_strategy(num_particles: int = 2, copies: int = 2) -> CloningStrategy:
    """Do nothing; return the original (and ancillas as needed)."""
    return CloningStrategy(Leaf(tuple(range(1, copies + 1))), num_particles)


# -- sampled challenge ----------------------------------------------------------------

@dataclass
class BranchStats:
    trials: int = 0
    passes: int = 0
    returned: Counter = field(default_factory=Counter)

    @property
    def failures(self) -> int:
        return self.trials - self.passes


@dataclass
class ChallengeResult:
    trials: int
    passes: int
    branches: dict[tuple[int, ...], BranchStats]
    logs: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 0 <= self.passes <= self.trials:
            raise ValueError("passes must lie between 0 and trials")

    @property
    def pass_rate(self) -> Fraction:
        return Fraction(self.passes, self.trials) if self.trials else Fraction(0)

    def to_json(self, god_view: bool = False) -> dict:
        branches = []
        for path, b in sorted(self.branches.items()):
            entry = {"path": list(path), "trials": b.trials, "passes": b.passes, "failures": b.failures}
            if god_view:
                entry["returned_states"] = {",".join(map(str, k)): v for k, v in sorted(b.returned.items())}
            branches.append(entry)
        return {
            "trials": self.trials,
            "passes": self.passes,
            "pass_rate": frac_str(self.pass_rate),
            "pass_rate_float": float(self.pass_rate),
            "branches": branches,
        }


def run_challenge(
    strategy: CloningStrategy,
    preparations: Sequence[Measurement] | None = None,
    trials: int = 10_000,
    rng: Stream | None = None,
    *,
    copies: int = 2,
    keep_logs: bool = False,
) -> ChallengeResult:
    """Play ``trials`` rounds of the cloning game.

    Trial ``i`` runs on ``rng.spawn(i)``: Peter picks a preparation
    uniformly, prepares at his station and walks the particle over to Alice,
    whose ancillas start in uniform hidden states. Her strategy runs with
    co-location enforced, the returned particles walk back, and Peter
    re-measures each one. ``copies=1`` is the control game where a single
    particle comes back.
    """
    preparations = list(preparations) if preparations is not None else default_preparations()
    rng = rng if rng is not None else Stream(0)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not preparations:
        raise ValueError("need at least one preparation")
    for p in preparations:
        require_valid(p)
        if p.num_particles != 1:
            raise ValueError("preparations are single-particle measurements")
    strategy.validate(copies)
    n = strategy.num_particles

    passes = 0
    branches: dict[tuple[int, ...], BranchStats] = {}
    logs = []
    for i in range(trials):
        sub = rng.spawn(i)
        prep = preparations[sub.randbelow(len(preparations))]
        world = World()
        rec = peter_prepare(prep, sub, world)
        move_particle(world, 1, ALICE_AT, actor="peter")
        for k in range(2, n + 1):
            world.add_particle(k, ALICE_AT, sub.randbelow(4), actor="alice")

        path: list[int] = []
        node = strategy.root
        while isinstance(node, Node):
            a = node.action
            if a.measurement is not None:
                s = joint_measure(world, a.measurement, list(a.targets), sub, actor="alice")
            else:
                local_op(world, a.targets[0], a.bijection, actor="alice")
                s = 0
            path.append(s)
            node = node.children[s]

        returned = node.particles
        move_particles(world, {p: PETER_AT for p in returned}, actor="alice")
        handed = tuple(world.register.god_view(p) for p in returned)
        outcomes = [joint_measure(world, prep, [p], sub, actor="peter") for p in returned]
        ok = all(o == rec.outcome for o in outcomes)

        b = branches.setdefault(tuple(path), BranchStats())
        b.trials += 1
        b.passes += ok
        b.returned[handed] += 1
        passes += ok
        if keep_logs:
            logs.append(world.log)
    return ChallengeResult(trials, passes, branches, logs)


# -- certificate --------------------------------------------------------------------------

def failure_certificate(
    c: OutcomeSet | Sequence[Sequence[int]], designated_columns: tuple[int, int], target: int
) -> Fraction:
    """Fraction of rows of ``c`` whose designated pair differs from ``(target, target)``.

    After an outcome with set ``c`` the state is a uniform row of ``c``, so
    this is the chance that the two designated particles are not both
    ``target``. If some row has ``(target, target)`` the result is at least
    1/4, since another value fills a quarter of the first designated column.
    """
    oc = c if isinstance(c, OutcomeSet) else OutcomeSet(tuple(c))
    n1, n2 = designated_columns
    if n1 == n2:
        raise ValueError("designated columns must differ")
    if not (1 <= n1 <= oc.num_particles and 1 <= n2 <= oc.num_particles):
        raise ValueError("designated column out of range")
    bad = sum(1 for row in oc.rows if (row[n1 - 1], row[n2 - 1]) != (target, target))
    return Fraction(bad, oc.size)


def _random_column(rng: Stream, L: int) -> list[int]:
    quarter = -(-L // 4)
    kmax = min(4, L // quarter)
    k = 2 + rng.randbelow(kmax - 1)
    counts = [quarter] * k
    for _ in range(L - k * quarter):
        counts[rng.randbelow(k)] += 1
    values = [0, 1, 2, 3]
    rng.shuffle(values)
    col = [v for v, c in zip(values, counts) for _ in range(c)]
    rng.shuffle(col)
    return col


def _template_sets() -> list[tuple[tuple[int, ...], ...]]:
    from toylocal.bell import bell_measurement

    out = [tuple(map(tuple, rows)) for rows in bell_measurement().outcomes]
    # columns (2,0,0,2,2), (1,1,3,3,1), (0,0,0,1,1)
    out.append(((2, 1, 0), (0, 1, 0), (0, 3, 0), (2, 3, 1), (2, 1, 1)))
    return out


def random_outcome_set(
    rng: Stream, num_particles: int | None = None, *, max_rows: int = 12, attempts: int = 100
) -> OutcomeSet:
    """A random valid outcome set, built column by column or from a template.

    Column mode draws each column directly from the valid column multisets
    (2..4 distinct values, each at least a quarter of the rows). Template mode
    takes a known set, permutes values within each column, permutes columns
    and shuffles rows. Every result is re-validated. Coverage is limited to
    sets whose columns are independent draws (column mode) or relabellings
    of the templates.
    """
    templates = [t for t in _template_sets() if num_particles in (None, len(t[0]))]
    for _ in range(attempts):
        if templates and rng.randbelow(4) == 0:
            base = rng.choice(templates)
            n = len(base[0])
            relabel = []
            for _col in range(n):
                perm = [0, 1, 2, 3]
                rng.shuffle(perm)
                relabel.append(perm)
            order = list(range(n))
            rng.shuffle(order)
            rows = [tuple(relabel[j][row[order[j]]] for j in range(n)) for row in base]
            rng.shuffle(rows)
        else:
            n = num_particles if num_particles is not None else 1 + rng.randbelow(4)
            L = 2 + rng.randbelow(max_rows - 1)
            rows = list(zip(*(_random_column(rng, L) for _ in range(n))))
        if validate_outcome_set(rows):
            return OutcomeSet(tuple(rows))
    raise RuntimeError("could not build a valid outcome set; raise `attempts`")


def sample_outcome_sets(rng: Stream, count: int, num_particles: int | None = None, **kw) -> list[OutcomeSet]:
    return [random_outcome_set(rng.spawn(i), num_particles, **kw) for i in range(count)]


# -- exact search ---------------------------------------------------------------------------

Key = tuple  # (preparation index, Peter's outcome, hidden values of all particles)
Dist = dict


def default_catalog(n: int) -> list[Action]:
    """Rotations and canonical single-particle measurements on every particle,
    and the Bell-like measurement on every pair."""
    from toylocal.bell import bell_measurement

    singles = enumerate_valid_measurements(1)
    out: list[Action] = []
    for i in range(1, n + 1):
        out.extend(Action((i,), bijection=rotation(k)) for k in range(4))
        out.extend(Action((i,), measurement=m) for m in singles)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out.append(Action((i, j), measurement=bell_measurement()))
    return out


def all_leaves(n: int, copies: int = 2) -> list[Leaf]:
    return [Leaf(p) for p in permutations(range(1, n + 1), copies)]


def initial_distribution(preparations: Sequence[Measurement], n: int) -> Dist:
    """Joint law of (preparation, Peter's outcome, hidden values) when Alice starts."""
    dist: Dist = {}
    for j, p in enumerate(preparations):
        for x0 in range(4):
            r = find_outcome(p, (x0,))
            rows = p.outcomes[r]
            w = Fraction(1, len(preparations) * 4 * len(rows) * 4 ** (n - 1))
            for row in rows:
                for anc in product(range(4), repeat=n - 1):
                    key = (j, r, (row[0],) + anc)
                    dist[key] = dist.get(key, Fraction(0)) + w
    return dist


def apply_action(dist: Dist, action: Action) -> list[Dist]:
    """Unnormalised distribution after ``action``, one per outcome."""
    idx = [t - 1 for t in action.targets]
    if action.bijection is not None:
        u, i = action.bijection, idx[0]
        out: Dist = {}
        for (j, r, xs), w in dist.items():
            ys = xs[:i] + (u(xs[i]),) + xs[i + 1:]
            out[(j, r, ys)] = out.get((j, r, ys), Fraction(0)) + w
        return [out]
    m = action.measurement
    table = m.lookup_table()
    children: list[Dist] = [{} for _ in range(m.R)]
    for (j, r, xs), w in dist.items():
        code = 0
        for i in idx:
            code = code * 4 + xs[i]
        s = int(table[code])
        rows = m.outcomes[s]
        share = w / len(rows)
        child = children[s]
        for row in rows:
            ys = list(xs)
            for i, v in zip(idx, row):
                ys[i] = v
            key = (j, r, tuple(ys))
            child[key] = child.get(key, Fraction(0)) + share
    return children


def leaf_value(dist: Dist, leaf: Leaf, preparations: Sequence[Measurement]) -> Fraction:
    tables = [p.lookup_table() for p in preparations]
    total = Fraction(0)
    for (j, r, xs), w in dist.items():
        t = tables[j]
        if all(t[xs[p - 1]] == r for p in leaf.particles):
            total += w
    return total


def count_trees(num_leaves: int, catalog: Sequence[Action], depth: int) -> int:
    """Number of distinct decision trees of depth at most ``depth``."""
    count = num_leaves
    for _ in range(depth):
        count = num_leaves + sum(count ** a.arity for a in catalog)
    return count


@dataclass
class SearchResult:
    strategy: CloningStrategy
    probability: Fraction
    depth: int
    trees_in_space: int
    evaluations: int
    preparations: list[Measurement]

    def to_json(self) -> dict:
        return {
            "num_particles": self.strategy.num_particles,
            "depth": self.depth,
            "preparations": [p.name or measurement_to_json(p) for p in self.preparations],
            "max_pass_probability": frac_str(self.probability),
            "max_pass_probability_float": float(self.probability),
            "perfect_cloning_found": self.probability >= 1,
            "trees_in_space": self.trees_in_space,
            "evaluations": self.evaluations,
            "best_strategy": self.strategy.to_json(),
            "best_strategy_text": self.strategy.describe(),
        }


def search_strategies(
    n: int,
    depth: int,
    catalog: Sequence[Action] | None = None,
    preparations: Sequence[Measurement] | None = None,
    *,
    copies: int = 2,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> SearchResult:
    """Best strategy over every decision tree of depth <= ``depth``, exactly.

    A tree's pass probability is the sum over its branches of the branch
    probability times the subtree's conditional value, so picking the best
    subtree for each outcome independently (memoised on the unnormalised
    distribution reached) maximises over the whole tree space without
    listing it. Ties keep the earliest candidate: leaves first, then
    catalog order.
    """
    if not 1 <= n <= 3:
        raise ValueError("exhaustive search supports 1 <= n <= 3 particles")
    if not 0 <= depth <= 2:
        raise ValueError("exhaustive search supports depth 0..2")
    if copies > n:
        raise ValueError(f"cannot return {copies} particles out of {n}")
    preparations = list(preparations) if preparations is not None else default_preparations()
    for p in preparations:
        require_valid(p)
        if p.num_particles != 1:
            raise ValueError("preparations are single-particle measurements")
    catalog = list(catalog) if catalog is not None else default_catalog(n)
    probe = CloningStrategy(Leaf(tuple(range(1, copies + 1))), n)
    for a in catalog:
        probe._check(Node(a, (probe.root,) * a.arity), copies)
    leaves = all_leaves(n, copies)

    memo: dict = {}
    evaluations = 0

    def best(dist: Dist, d: int) -> tuple[Fraction, Tree]:
        nonlocal evaluations
        key = (frozenset(dist.items()), d)
        hit = memo.get(key)
        if hit is not None:
            return hit
        evaluations += 1
        if evaluations > node_budget:
            raise SearchBudgetExceeded(f"search exceeded the node budget of {node_budget}")
        mass = sum(dist.values(), Fraction(0))
        top, tree = Fraction(-1), leaves[0]
        for leaf in leaves:
            v = leaf_value(dist, leaf, preparations)
            if v > top:
                top, tree = v, leaf
        if d > 0 and top < mass:
            for a in catalog:
                value, kids = Fraction(0), []
                for child in apply_action(dist, a):
                    if child:
                        cv, ct = best(child, d - 1)
                    else:
                        cv, ct = Fraction(0), leaves[0]
                    value += cv
                    kids.append(ct)
                if value > top:
                    top, tree = value, Node(a, tuple(kids))
        memo[key] = (top, tree)
        return top, tree

    value, tree = best(initial_distribution(preparations, n), depth)
    return SearchResult(
        strategy=CloningStrategy(tree, n),
        probability=value,
        depth=depth,
        trees_in_space=count_trees(len(leaves), catalog, depth),
        evaluations=evaluations,
        preparations=preparations,
    )


# -- independent oracles --------------------------------------------------------------------

def exact_pass_probability(
    strategy: CloningStrategy, preparations: Sequence[Measurement] | None = None, *, copies: int = 2
) -> Fraction:
    """Pass probability of one strategy by walking every random path explicitly."""
    preparations = list(preparations) if preparations is not None else default_preparations()
    strategy.validate(copies)
    n = strategy.num_particles

    def walk(tree: Tree, xs: list[int], p: Measurement, r: int) -> Fraction:
        if isinstance(tree, Leaf):
            return Fraction(int(all(find_outcome(p, (xs[i - 1],)) == r for i in tree.particles)))
        a = tree.action
        if a.bijection is not None:
            ys = list(xs)
            ys[a.targets[0] - 1] = a.bijection(ys[a.targets[0] - 1])
            return walk(tree.children[0], ys, p, r)
        s = find_outcome(a.measurement, tuple(xs[i - 1] for i in a.targets))
        rows = a.measurement.outcomes[s]
        acc = Fraction(0)
        for row in rows:
            ys = list(xs)
            for i, v in zip(a.targets, row):
                ys[i - 1] = v
            acc += walk(tree.children[s], ys, p, r)
        return acc / len(rows)

    total = Fraction(0)
    for p in preparations:
        for x0 in range(4):
            r = find_outcome(p, (x0,))
            rows = p.outcomes[r]
            for row in rows:
                for anc in product(range(4), repeat=n - 1):
                    w = Fraction(1, len(preparations) * 4 * len(rows) * 4 ** (n - 1))
                    total += w * walk(strategy.root, [row[0], *anc], p, r)
    return total


def enumerate_strategies(n: int, depth: int, catalog: Sequence[Action], copies: int = 2) -> Iterator[CloningStrategy]:
    """Every decision tree of depth <= ``depth`` over ``catalog``, one by one."""

    def trees(d: int) -> Iterator[Tree]:
        yield from all_leaves(n, copies)
        if d == 0:
            return
        sub = list(trees(d - 1))
        for a in catalog:
            for kids in product(sub, repeat=a.arity):
                yield Node(a, kids)

    for t in trees(depth):
        yield CloningStrategy(t, n)
