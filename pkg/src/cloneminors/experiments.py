"""Reproducible experiments: maximal-clone table evidence, oracle cross-checks, intersections.

Each experiment returns an ExperimentReport.  Checks are recorded under
stable ids and serialized in id order, so a report depends only on its
parameters and seed.  A check that would exceed a resource budget, or that
falls outside what the oracle can decide, is recorded as skipped together
with the reason; it is never silently dropped.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .core import OpTable, all_operations, range_of, tuples_of
from .errors import BudgetExceeded, UndecidedError
from .relations import (
    ChainE, CloneSpec, Generated, Relation, Relational, chain_clone, clone_membership,
    equivalence_from_blocks, is_prime_permutation, make_bounded_order, make_central_sigma,
    make_equivalence, make_iota, make_prime_affine, make_prime_permutation, preserves,
    relational_form, slupecki_chain, slupecki_chain_m, ta_minus_monoid,
)
from .search import (
    Session, count_clone_ops, enum_clone_ops, is_minor, partition_classes,
)
from .trees import count_classes_tree, minor_via_trees
from .witnesses import (
    FamilySpec, PhiSignature, _subset2_tuples, discriminator, family_clone, family_min_n,
    family_sanity, phi_signature, witness_family,
)

OUTCOMES = ("pass", "fail", "skipped")
FAMILY_ORACLE_BUDGET = 2 * 10 ** 4


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    outcome: str
    detail: str = ""
    data: Any = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.outcome == "skipped" and not self.detail:
            raise ValueError("a skipped check needs a reason")

    def to_json(self) -> dict:
        out = {"id": self.check_id, "outcome": self.outcome, "detail": self.detail}
        if self.data is not None:
            out["data"] = self.data
        return out


@dataclass
class ExperimentReport:
    """Per-check outcomes of one experiment.

    Timings are collected only when timed is set, since wall-clock numbers
    would make otherwise identical reports differ.
    """

    experiment: str
    params: dict
    checks: dict[str, CheckResult] = field(default_factory=dict)
    timed: bool = False
    timings: dict[str, float] = field(default_factory=dict)

    def record(self, check_id: str, outcome: str, detail: str = "", data: Any = None) -> CheckResult:
        if check_id in self.checks:
            raise ValueError(f"duplicate check id {check_id}")
        result = CheckResult(check_id, outcome, detail, data)
        self.checks[check_id] = result
        return result

    def run(self, check_id: str, fn: Callable[[], tuple]) -> CheckResult:
        """Run fn() -> (passed, detail[, data]); budget and scope limits become skips."""
        start = time.perf_counter()
        try:
            out = fn()
            passed, detail = bool(out[0]), str(out[1])
            data = out[2] if len(out) > 2 else None
            result = self.record(check_id, "pass" if passed else "fail", detail, data)
        except BudgetExceeded as exc:
            result = self.record(check_id, "skipped", f"budget: {exc}")
        except UndecidedError as exc:
            result = self.record(check_id, "skipped", f"scope: {exc}")
        if self.timed:
            self.timings[check_id] = round(time.perf_counter() - start, 3)
        return result

    def counts(self) -> dict[str, int]:
        out = {o: 0 for o in OUTCOMES}
        for c in self.checks.values():
            out[c.outcome] += 1
        return out

    @property
    def exit_code(self) -> int:
        counts = self.counts()
        if counts["fail"]:
            return 2
        return 3 if counts["skipped"] else 0

    def to_json(self) -> dict:
        checks = [self.checks[c].to_json() for c in sorted(self.checks)]
        out = {"experiment": self.experiment, "params": self.params,
               "checks": checks, "counts": self.counts(),
               "input_digest": digest(self.params), "output_digest": digest(checks)}
        if self.timed:
            out["timings"] = {c: self.timings[c] for c in sorted(self.timings)}
        return out

    def render_text(self) -> str:
        lines = [f"{self.experiment} {canonical_json(self.params)}"]
        for cid in sorted(self.checks):
            c = self.checks[cid]
            lines.append(f"  {c.outcome.upper():7} {cid}" + (f": {c.detail}" if c.detail else ""))
        counts = self.counts()
        lines.append("  " + ", ".join(f"{counts[o]} {o}" for o in OUTCOMES))
        return "\n".join(lines)


# Shared mechanisms.

def sample_ops(k: int, n: int, count: int, rng: random.Random,
               values: Sequence[int] | None = None) -> list[OpTable]:
    """count distinct random n-ary tables (values drawn from `values`), or all if fewer exist."""
    values = list(range(k)) if values is None else list(values)
    total = len(values) ** (k ** n)
    if total <= count:
        return [OpTable(k, n, tuple(t)) for t in itertools.product(values, repeat=k ** n)]
    seen: dict[tuple, None] = {}
    while len(seen) < count:
        seen[tuple(rng.choice(values) for _ in range(k ** n))] = None
    return [OpTable(k, n, t) for t in seen]


def phi_groups(ops: Iterable[OpTable], c: int = 0) -> dict[PhiSignature, list[OpTable]]:
    groups: dict[PhiSignature, list[OpTable]] = {}
    for f in ops:
        groups.setdefault(phi_signature(f, c), []).append(f)
    return groups


def check_groups(groups: dict[Any, list[OpTable]], spec: CloneSpec,
                 session: Session) -> list[tuple[OpTable, OpTable]]:
    """Pairs (representative, member) within a group that the oracle finds inequivalent."""
    bad = []
    for members in groups.values():
        rep = members[0]
        for f in members[1:]:
            if is_minor(f, rep, spec, session) is None or is_minor(rep, f, spec, session) is None:
                bad.append((rep, f))
    return bad


def oracle_feasible(spec: CloneSpec, n: int, session: Session) -> str | None:
    """None if every relation of the clone can be held as n-ary matrices, else the reason."""
    rel = relational_form(spec)
    if rel is None:
        return None
    big = [c.arity for c in rel.constraints() if not session.constraint(c, n).incremental]
    if big:
        return (f"scope: relation matrices of arity {big[0]} at n={n} exceed the matrix cap, "
                "so the search could not prune")
    return None


def family_inequivalence(report: ExperimentReport, prefix: str, fam: str, k: int,
                         pairs: Iterable[tuple[int, int]], budget: int) -> None:
    """For each (n, m) with n < m, check with the oracle that f_n and f_m are not equivalent.

    The direction the construction refutes is searched first: f_n below f_m
    for the families inside Pol sigma_0, f_m below f_n for the others.  A
    second search runs only when the first finds a witness.
    """
    for n, m in pairs:
        cid = f"{prefix}/oracle f_{n} and f_{m} inequivalent"
        spec = family_clone(FamilySpec(fam, k, n))
        session = Session(budget_assignments=budget)
        try:
            fn = witness_family(FamilySpec(fam, k, n))
            fm = witness_family(FamilySpec(fam, k, m))
        except BudgetExceeded as exc:
            report.record(cid, "skipped", f"budget: {exc}")
            continue
        small_first = fam.startswith("Centralk1")
        order = [(fn, fm, n, m), (fm, fn, m, n)] if small_first else [(fm, fn, m, n), (fn, fm, n, m)]
        reason = oracle_feasible(spec, max(fn.arity, fm.arity), session)
        if reason is not None:
            report.record(cid, "skipped", reason)
            continue

        def check(order=order, spec=spec, session=session):
            found = []
            for a, b, i, j in order:
                w = is_minor(a, b, spec, session)
                if w is None:
                    return True, f"no h in C with f_{i} = f_{j} o h"
                found.append(f"f_{i} = f_{j} o {w.to_json()}")
            return False, "equivalent: " + "; ".join(found)
        report.run(cid, check)


def family_sanity_checks(report: ExperimentReport, prefix: str, fam: str, k: int,
                         ns: Iterable[int], **params) -> None:
    for n in ns:
        def check(n=n):
            rep = family_sanity(FamilySpec(fam, k, n, **params))
            bad = [c.name for c in rep.failures()]
            return not bad, (f"{len(rep.claims)} claims hold" if not bad
                             else "failed: " + "; ".join(bad))
        report.run(f"{prefix}/sanity n={n}", check)


def _unary_and_sample(spec: CloneSpec, sample: int, rng: random.Random, session: Session,
                      values_for: Callable[[], Sequence[int]] | None = None) -> list[OpTable]:
    """All unary members plus up to `sample` random binary members (rejection sampled)."""
    k = spec.k
    ops = list(enum_clone_ops(spec, 1, session))
    found: dict[tuple, OpTable] = {}
    attempts = 0
    while len(found) < sample and attempts < 200 * sample:
        attempts += 1
        values = values_for() if values_for else range(k)
        values = list(values)
        t = tuple(rng.choice(values) for _ in range(k * k))
        if t in found:
            continue
        f = OpTable(k, 2, t)
        if clone_membership(f, spec, session):
            found[t] = f
    return ops + [found[t] for t in sorted(found)]


# Maximal-clone table.

def cmd_table1(k: int, seed: int = 0, session: Session | None = None, sample: int = 40,
               family_budget: int = FAMILY_ORACLE_BUDGET, timed: bool = False) -> ExperimentReport:
    """At least one executed check per row of the maximal-clone table at k = 3 or 4."""
    if k not in (3, 4):
        raise ValueError("table1 is defined for k in {3, 4}")
    session = session or Session()
    rng = random.Random(seed)
    report = ExperimentReport("table1", {"k": k, "seed": seed, "sample": sample,
                                         "family_budget": family_budget}, timed=timed)
    t = discriminator(k)

    order = make_bounded_order(k, [(a, b) for a in range(k) for b in range(a, k)])
    report.run("01 bounded order (no)/discriminator not in Pol rho", lambda: (
        not preserves(t, order),
        "t_A fails to preserve the order, so the discriminator route does not apply; "
        "non-membership itself is an imported result"))

    perm = tuple(list(range(1, k)) + [0]) if k == 3 else (1, 0, 3, 2)
    gamma = make_prime_permutation(perm)
    report.run("02 prime permutation (yes)/discriminator in Pol gamma", lambda: (
        is_prime_permutation(perm) and preserves(t, gamma),
        f"gamma = {list(perm)}; t_A preserves its graph"))

    blocks = [[0, 1], list(range(2, k))]
    chain = ChainE.from_partitions(k, [blocks])
    unary = list(all_operations(k, 1))

    def eq_unary():
        trees = count_classes_tree(unary, chain)
        oracle = partition_classes(unary, chain_clone(chain), session)
        same = all(trees.same_class(i, j) == oracle.same_class(i, j)
                   for i in range(len(unary)) for j in range(i))
        return same, f"{trees.count} classes of unary ops; tree and oracle partitions agree", \
            {"classes": trees.count}
    report.run("03 equivalence relation (yes)/tree classes = oracle classes, unary", eq_unary)

    def eq_binary():
        ops = unary + sample_ops(k, 2, sample, rng)
        trees = count_classes_tree(ops, chain)
        return True, f"{trees.count} tree classes among {len(ops)} ops of arity <= 2", \
            {"ops": len(ops), "classes": trees.count}
    report.run("03 equivalence relation (yes)/tree class count, arity <= 2 sample", eq_binary)

    affine = make_prime_affine(k)
    report.run("04 prime affine (no)/discriminator not in Pol rho", lambda: (
        not preserves(t, affine),
        "t_A fails to preserve x - y + z = w; non-membership itself is an imported result"))

    report.run("05 central h=1 (yes)/discriminator in Pol B", lambda: (
        all(preserves(t, Relation.from_tuples(k, 1, [(a,) for a in b]))
            for b in ([0], [0, 1], list(range(k - 1)))),
        "t_A preserves every nonempty subset tried"))

    if k == 3:
        report.run("06 central 2<=h<=k-2 (no)/not instantiable", lambda: (
            not list(range(2, k - 1)), "no arity h with 2 <= h <= k-2 at k = 3"))
        report.run("08 h-regular h<k (no)/not instantiable", lambda: (
            not list(range(3, k)), "h-regular relations need 3 <= h < k; none at k = 3"))
    else:
        family_sanity_checks(report, "06 central 2<=h<=k-2 (no)/CentralR", "CentralR", k, (2, 3))
        family_inequivalence(report, "06 central 2<=h<=k-2 (no)/CentralR", "CentralR", k,
                             [(2, 3)], family_budget)
        family_sanity_checks(report, "08 h-regular h<k (no)/HRegSingle", "HRegSingle", k,
                             (2, 3, 4))
        family_inequivalence(report, "08 h-regular h<k (no)/HRegSingle", "HRegSingle", k,
                             [(2, 3)], family_budget)

    sigma_clone = Relational(k, (make_central_sigma(k, 0),), subsets=(frozenset({0}),))

    def phi_check():
        ops = _unary_and_sample(sigma_clone, sample, rng, session)
        groups = phi_groups(ops)
        bad = check_groups(groups, sigma_clone, session)
        bound = (2 ** k - 1) * k * 2
        detail = (f"{len(ops)} members of Pol(sigma_0, {{0}}) fall into {len(groups)} Phi groups "
                  f"(codomain size {bound}); {len(bad)} groups split by the oracle")
        return not bad and len(groups) <= bound, detail, {"ops": len(ops), "groups": len(groups)}
    report.run("07 central h=k-1 (yes)/Phi groups are oracle classes", phi_check)

    slup_m = slupecki_chain_m(k, k - 1, ta_minus_monoid(k))

    subsets = [s for size in range(1, k) for s in itertools.combinations(range(k), size)]

    def range_check(arity: int):
        if arity == 1:
            ops = list(enum_clone_ops(slup_m, 1, session))
        else:
            ops = _unary_and_sample(slup_m, sample, rng, session,
                                    values_for=lambda: rng.choice(subsets))
        groups: dict[frozenset, list[OpTable]] = {}
        for f in ops:
            groups.setdefault(range_of(f), []).append(f)
        bad = check_groups(groups, slup_m, session)
        return not bad, (f"{len(ops)} members of B_(k-1)(T_A^-) in {len(groups)} range groups; "
                         f"{len(bad)} split by the oracle"), {"ops": len(ops), "groups": len(groups)}
    report.run("09 h-regular h=k (yes)/equal range implies equivalence, unary members",
               lambda: range_check(1))
    report.run("09 h-regular h=k (yes)/equal range implies equivalence, binary sample",
               lambda: range_check(2))

    iota = make_iota(k)
    slup = slupecki_chain(k, k - 1)
    report.run("09 h-regular h=k (yes)/Slupecki clone is Pol iota_k on unary ops", lambda: (
        all(clone_membership(f, slup) == preserves(f, iota) for f in unary),
        f"{len(unary)} unary ops agree"))
    return report


# Oracle cross-check of the tree criterion.

def cmd_crosscheck(chain: ChainE, max_arity: int, seed: int = 0, session: Session | None = None,
                   max_pairs: int = 2000, oracle: str = "chain", dump: int = 5,
                   timed: bool = False) -> ExperimentReport:
    """Agreement of minor_via_trees with the brute-force minor oracle, per arity pair.

    oracle="chain" searches in Pol(E, Aut E, P+(A)) directly; oracle="discriminator"
    (E empty only) uses the clone generated by t_A instead.  Arity pairs with more
    than max_pairs pairs are sampled with the seed, and the report says so.
    """
    session = session or Session()
    k = chain.k
    rng = random.Random(seed)
    if oracle == "chain":
        spec: CloneSpec = chain_clone(chain)
    elif oracle == "discriminator":
        if chain.length:
            raise ValueError("the discriminator oracle applies to the empty chain only")
        spec = Generated(k, (discriminator(k),))
    else:
        raise ValueError(f"unknown oracle {oracle!r}")
    report = ExperimentReport("crosscheck", {
        "chain": chain.to_json(), "max_arity": max_arity, "seed": seed,
        "max_pairs": max_pairs, "oracle": oracle}, timed=timed)
    ops = {n: list(all_operations(k, n)) for n in range(1, max_arity + 1)}
    for n, m in itertools.product(range(1, max_arity + 1), repeat=2):
        total = len(ops[n]) * len(ops[m])
        if total <= max_pairs:
            pairs = list(itertools.product(range(len(ops[n])), range(len(ops[m]))))
            mode = "exhaustive"
        else:
            pairs = sorted({(rng.randrange(len(ops[n])), rng.randrange(len(ops[m])))
                            for _ in range(max_pairs)})
            mode = f"sample of {len(pairs)} of {total} pairs, seed {seed}"

        def check(n=n, m=m, pairs=pairs, mode=mode):
            agree, mismatches = 0, []
            for i, j in pairs:
                f, g = ops[n][i], ops[m][j]
                by_tree = minor_via_trees(f, g, chain)
                by_oracle = is_minor(f, g, spec, session) is not None
                if by_tree == by_oracle:
                    agree += 1
                elif len(mismatches) < dump:
                    mismatches.append({"f": f.to_json(), "g": g.to_json(),
                                       "trees": by_tree, "oracle": by_oracle})
            data = {"pairs": len(pairs), "agree": agree, "mode": mode}
            if mismatches:
                data["counterexamples"] = mismatches
            return agree == len(pairs), f"{agree}/{len(pairs)} agree ({mode})", data
        report.run(f"arity {n} x {m}", check)
    return report


# Intersections of maximal clones.

def cmd_intersections(k: int = 3, seed: int = 0, session: Session | None = None,
                      family_budget: int = FAMILY_ORACLE_BUDGET,
                      slupecki_pairs: Sequence[tuple[int, int]] = ((2, 3), (3, 4), (4, 5)),
                      timed: bool = False) -> ExperimentReport:
    """Every pair type of maximal clones in the finite-class family, at k = 3."""
    if k != 3:
        raise ValueError("intersections is defined for k = 3")
    session = session or Session()
    report = ExperimentReport("intersections", {
        "k": k, "seed": seed, "family_budget": family_budget,
        "slupecki_pairs": [list(p) for p in slupecki_pairs]}, timed=timed)
    t = discriminator(k)
    sigma0 = make_central_sigma(k, 0)
    eps = make_equivalence(k, [[0, 1], [2]])
    eps2 = make_equivalence(k, [[0, 2], [1]])
    cyc = (1, 2, 0)
    binary = list(all_operations(k, 2))

    # Slupecki's clone with each other maximal clone: all negative.
    pre = "B_(k-1) with Pol sigma_0 (no)"
    family_sanity_checks(report, pre, "SlupCentral", k, range(1, 7))
    slup_sigma = family_clone(FamilySpec("SlupCentral", k, 2))
    for n, m in slupecki_pairs:
        cid = f"{pre}/oracle f_{m} not below f_{n}"
        fn = witness_family(FamilySpec("SlupCentral", k, n))
        fm = witness_family(FamilySpec("SlupCentral", k, m))
        budget_session = Session(budget_assignments=family_budget)
        reason = oracle_feasible(slup_sigma, m, budget_session)
        if reason is not None:
            report.record(cid, "skipped", reason)
            continue

        def check(fn=fn, fm=fm, n=n, m=m, s=budget_session):
            w = is_minor(fm, fn, slup_sigma, s)
            return w is None, (f"no h with f_{m} = f_{n} o h" if w is None
                               else f"witness {w.to_json()}")
        report.run(cid, check)
    family_sanity_checks(report, "B_(k-1) with Pol B (no)", "SlupSubset", k, range(3, 7))
    family_inequivalence(report, "B_(k-1) with Pol B (no)", "SlupSubset", k, [(3, 4)],
                         family_budget)
    family_sanity_checks(report, "B_(k-1) with Pol epsilon (no)", "SlupEqrel", k, range(1, 4))
    family_inequivalence(report, "B_(k-1) with Pol epsilon (no)", "SlupEqrel", k, [(1, 2)],
                         family_budget)

    def perm_in_bk2():
        gamma = make_prime_permutation(cyc)
        slup, lower = slupecki_chain(k, k - 1), slupecki_chain(k, k - 2)
        members = [f for f in list(all_operations(k, 1)) + binary
                   if clone_membership(f, slup) and preserves(f, gamma)]
        bad = [f for f in members if not clone_membership(f, lower)]
        return not bad, f"{len(members)} ops of arity <= 2 in Pol gamma and B_(k-1), all in B_(k-2)"
    report.run("B_(k-1) with Pol gamma (no)/C inside B_(k-2)", perm_in_bk2)

    # Pol sigma_0 with each other maximal clone: positive only for Pol {0}.
    sigma_c = Relational(k, (sigma0,), subsets=(frozenset({0}),))

    def phi_all():
        ops = [f for n in (1, 2) for f in enum_clone_ops(sigma_c, n, session)]
        groups = phi_groups(ops)
        bad = check_groups(groups, sigma_c, session)
        return (not bad and len(groups) <= 42,
                f"{len(ops)} members of arity <= 2 in {len(groups)} Phi groups, "
                f"{len(bad)} split by the oracle; bound 42",
                {"ops": len(ops), "classes": len(groups)})
    report.run("Pol sigma_0 with Pol {0} (yes)/Phi classes over arity <= 2", phi_all)

    for fam in ("Centralk1Subset1", "Centralk1Subset2"):
        n0 = family_min_n(fam, k)
        family_sanity_checks(report, f"Pol sigma_0 with Pol B (no)/{fam}", fam, k, range(n0, 8))
        family_inequivalence(report, f"Pol sigma_0 with Pol B (no)/{fam}", fam, k,
                             [(n0, n0 + 1)], family_budget)
    n0 = family_min_n("Centralk1Central", k)
    family_sanity_checks(report, "Pol sigma_0 with Pol sigma_2 (no)", "Centralk1Central", k,
                         range(n0, 8))
    family_inequivalence(report, "Pol sigma_0 with Pol sigma_2 (no)", "Centralk1Central", k,
                         [(n0, n0 + 1)], family_budget)

    def boundary():
        sigma2 = make_central_sigma(k, 2)
        hits = {}
        for n in (4, 5):
            cs = _subset2_tuples(n)
            hits[n] = [i + 1 for i in range(n - 1) if in_power_pair(sigma2, cs[i], cs[-1])]
        return hits == {4: [1, 2], 5: [1]}, (
            f"(c_i, c_n) lies in sigma_2^n for i in {hits[4]} at n = 4 and {hits[5]} at n = 5, "
            "so the family starts at n = 5")
    report.run("Pol sigma_0 with Pol sigma_2 (no)/n = 4 is excluded", boundary)
    family_sanity_checks(report, "Pol sigma_0 with Pol epsilon (no)", "Centralk1Eqrel", k,
                         range(4, 8))
    family_inequivalence(report, "Pol sigma_0 with Pol epsilon (no)", "Centralk1Eqrel", k,
                         [(4, 5)], family_budget)
    family_sanity_checks(report, "Pol sigma_0 with Pol gamma (no)", "Centralk1Perm", k, (7, 8))
    family_inequivalence(report, "Pol sigma_0 with Pol gamma (no)", "Centralk1Perm", k,
                         [(7, 8)], family_budget)

    # Equivalence relations with permutations, subsets and equivalences.
    def eq_perm():
        gamma = make_prime_permutation(cyc)
        image = equivalence_from_blocks(k, [[cyc[a] for a in b] for b in eps.blocks()])
        incomparable = not eps.issubset(image) and not image.issubset(eps)
        clone = Relational(k, (eps, gamma))
        members = list(enum_clone_ops(clone, 2, session))
        ok = all(preserves(f, image) for f in members)
        return (not preserves(OpTable(k, 1, cyc), eps) and incomparable and ok,
                f"gamma moves epsilon to an incomparable equivalence preserved by all "
                f"{len(members)} binary members of Pol(gamma, epsilon)")
    report.run("Pol epsilon with Pol gamma, gamma not in Pol epsilon (no)/incomparable image",
               eq_perm)
    for n in (1, 2):
        def eq_eq(n=n):
            count = count_clone_ops(Relational(k, (eps, eps2)), n, session)
            bound = (k - 1) ** (2 * (k - 1) ** n)
            return count <= bound, f"|Pol(epsilon, epsilon')^({n})| = {count} <= {bound}"
        report.run(f"Pol epsilon with Pol epsilon' incomparable (no)/size bound n={n}", eq_eq)

    chain = ChainE(k, (eps,))

    def eq_subset():
        clone = chain_clone(chain)
        members = list(enum_clone_ops(clone, 2, session))
        subsets = [frozenset(s) for size in (1, 2) for s in itertools.combinations(range(k), size)]
        ok = all(preserves(f, eps) and all(set(f.table[i] for i, x in enumerate(tuples_of(k, 2))
                                               if set(x) <= s) <= s for s in subsets)
                 for f in members)
        return ok, (f"all {len(members)} binary members of Pol(E, Aut E, P+(A)) lie in "
                    "Pol epsilon and every Pol B")
    report.run("Pol epsilon with Pol B (yes)/chain clone below the intersection", eq_subset)

    for name, rels in (("Pol gamma with Pol B", [make_prime_permutation(cyc),
                                                 Relation.from_tuples(k, 1, [(0,)])]),
                       ("Pol B with Pol B'", [Relation.from_tuples(k, 1, [(0,)]),
                                              Relation.from_tuples(k, 1, [(0,), (1,)])])):
        report.run(f"{name} (yes)/discriminator in the intersection", lambda rels=rels: (
            all(preserves(t, r) for r in rels), "t_A preserves both relations"))
    return report


def in_power_pair(rel: Relation, x: Sequence[int], y: Sequence[int]) -> bool:
    """Whether every column (x_j, y_j) lies in the binary relation."""
    return all((a, b) in rel for a, b in zip(x, y))
