"""Property suites: exact equality checks runnable from the CLI and tests.

Each suite returns (ok, lines); lines are human-readable one-per-check
reports.  Randomized suites take an explicit seed and report it.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .correlators import (
    CorrelatorKey,
    MultiIndex,
    apply_puncture_dilaton,
    apply_trr_kappa,
    apply_trr_psi,
    evaluate,
    evaluate_combination,
    evaluate_kappa_first,
    make_key,
    selection,
)
from .gw import gw_potential_series
from .potentials import (
    build_H_series,
    cp1_h_sequence,
    cp1_penult_residual,
    cp1_spec,
    trr_pde_residuals,
    wdvv_residuals,
)
from .target import TargetModel, projective_space
from .trees import (
    DecoratedTree,
    Decoration,
    aut_order,
    enumerate_two_vertex_divisors,
    forgetful_pushforward,
    psi_boundary_presentation,
    two_vertex_tree,
)

Entry = tuple[int, int]


def _degree_gap(key: CorrelatorKey) -> int:
    from .correlators import degree_sum, expected_dimension

    return degree_sum(key) - 2 * expected_dimension(key)


def random_admissible_key(
    target: TargetModel,
    rng: random.Random,
    d_max: int = 3,
    need: str | None = None,
    max_points: int = 5,
) -> CorrelatorKey:
    """Sample a selection-valid key, optionally guaranteeing pivot material.

    need: "psi" (a tau of level >= 1 plus two more points), "kappa_pos"
    (a kappa of level >= 1 plus two tau points), "kappa_zero" (a level-0
    kappa plus two tau points), "pd" (a comparison-relation pivot).
    """
    rank = target.rank
    for _ in range(400):
        d = rng.randint(1, d_max) if need else rng.randint(0, d_max)
        n_tau = rng.randint(0, max_points - 1)
        tau = [
            (rng.choice([0, 0, 0, 1, 1, 2]), rng.randrange(rank))
            for _ in range(n_tau)
        ]
        kappa = [
            (rng.choice([-1, 0, 0, 1]), rng.randrange(rank))
            for _ in range(rng.randint(0, 3))
        ]
        if need == "psi":
            tau.append((rng.randint(1, 2), rng.randrange(rank)))
            while len(tau) < 3:
                tau.append((0, rng.randrange(rank)))
        elif need == "kappa_pos":
            kappa.append((rng.randint(1, 2), rng.randrange(rank)))
            tau = [(0, alpha) for _, alpha in tau]
            while len(tau) < 2:
                tau.append((0, rng.randrange(rank)))
        elif need == "kappa_zero":
            kappa.append((0, rng.randrange(rank)))
            tau = [(0, alpha) for _, alpha in tau]
            while len(tau) < 2:
                tau.append((0, rng.randrange(rank)))
        elif need == "pd":
            tau.append((rng.randint(1, 2), rng.randrange(rank)))

        m = MultiIndex.from_list([(a, alpha, 1) for a, alpha in tau])
        p = MultiIndex.from_list([(a, alpha, 1) for a, alpha in kappa])
        key = CorrelatorKey(target, m, p, d)
        if key.d == 0 and key.n < 3:
            continue
        gap = _degree_gap(key)
        while gap > 0 and key.n < max_points + 3:
            key = CorrelatorKey(target, key.m.add(0, 0), key.p, key.d)
            gap = _degree_gap(key)
        while gap < 0 and key.m.entries:
            a, alpha = max(key.m.expand())
            key = CorrelatorKey(
                target, key.m.remove(a, alpha).add(a + 1, alpha), key.p, key.d
            )
            gap = _degree_gap(key)
        if gap != 0 or not selection(key):
            continue
        if key.d == 0 and key.n < 3:
            continue
        if need == "psi" and (key.m.max_level < 1 or key.n < 3):
            continue
        if need == "kappa_pos" and (key.p.max_level < 1 or key.m.norm < 2):
            continue
        if need == "kappa_zero" and (
            not any(a == 0 for (a, _), _ in key.p.entries) or key.m.norm < 2
        ):
            continue
        if need == "pd":
            pivots = [e for e in key.m.expand() if e[0] >= 1]
            if not pivots:
                continue
            if key.d == 0 and key.n == 3:
                continue
        return key
    raise RuntimeError(f"could not sample an admissible key (need={need})")


def _format_key(key: CorrelatorKey) -> str:
    taus = " ".join(
        f"tau_{a}^{alpha}" + (f"*{m}" if m > 1 else "")
        for (a, alpha), m in key.m.entries
    )
    kappas = " ".join(
        f"kappa_{a},{alpha}" + (f"*{m}" if m > 1 else "")
        for (a, alpha), m in key.p.entries
    )
    inner = " ".join(x for x in (taus, kappas) if x)
    return f"<{inner}>_{key.d}" if inner else f"<>_{key.d}"


def sample_relation_keys(
    targets: list[TargetModel], count: int, seed: int, d_max: int = 3
) -> list[CorrelatorKey]:
    """Deterministic pool of admissible keys cycling through pivot shapes."""
    rng = random.Random(seed)
    needs = ["psi", "kappa_pos", "kappa_zero", "pd"]
    keys = []
    i = 0
    while len(keys) < count:
        target = targets[i % len(targets)]
        need = needs[(i // len(targets)) % len(needs)]
        keys.append(random_admissible_key(target, rng, d_max, need))
        i += 1
    return keys


def two_sided_checks(key: CorrelatorKey) -> list[tuple[str, Fraction, Fraction]]:
    """LHS/RHS pairs for every relation whose preconditions the key meets."""
    out = []
    lhs = evaluate(key)
    points = list(key.m.expand())
    psi_pivots = [e for e in points if e[0] >= 1]
    if psi_pivots and len(points) >= 3:
        pivot = max(psi_pivots)
        others = list(points)
        others.remove(pivot)
        comb = apply_trr_psi(key, pivot, (others[0], others[1]))
        out.append(("trr-psi", lhs, evaluate_combination(comb)))
    if key.m.norm >= 2:
        for name, pred in (
            ("trr-kappa", lambda a: a >= 1),
            ("trr-kappa0", lambda a: a == 0),
        ):
            pivots = [e for e in key.p.expand() if pred(e[0])]
            if pivots:
                comb = apply_trr_kappa(key, max(pivots))
                out.append((name, lhs, evaluate_combination(comb)))
    if psi_pivots and not (key.d == 0 and key.n == 3):
        comb = apply_puncture_dilaton(key, max(psi_pivots))
        out.append(("comparison", lhs, evaluate_combination(comb)))
    return out


def verify_trr(
    targets: list[TargetModel], samples: int, seed: int, d_max: int = 3
) -> tuple[bool, list[str]]:
    """Two-sided checks of the recursion relations on random keys."""
    lines = [f"seed {seed}"]
    ok = True
    for key in sample_relation_keys(targets, samples, seed, d_max):
        for name, lhs, rhs in two_sided_checks(key):
            good = lhs == rhs
            ok = ok and good
            lines.append(
                f"{'ok  ' if good else 'FAIL'} {name} {key.target.name} "
                f"{_format_key(key)}: {lhs} vs {rhs}"
            )
    return ok, lines


def verify_dilaton(
    targets: list[TargetModel], samples: int, seed: int, d_max: int = 3
) -> tuple[bool, list[str]]:
    """Comparison-relation checks plus the special-value laws."""
    rng = random.Random(seed)
    lines = [f"seed {seed}"]
    ok = True
    per_target = max(1, samples // len(targets))
    for target in targets:
        for i in range(per_target):
            key = random_admissible_key(target, rng, d_max, "pd")
            pivot = max(e for e in key.m.expand() if e[0] >= 1)
            lhs = evaluate(key)
            rhs = evaluate_combination(apply_puncture_dilaton(key, pivot))
            good = lhs == rhs
            ok = ok and good
            lines.append(
                f"{'ok  ' if good else 'FAIL'} comparison {target.name} "
                f"{_format_key(key)}: {lhs} vs {rhs}"
            )
            # kappa_{0,0} insertion multiplies by n - 2
            base = random_admissible_key(target, rng, d_max)
            with_k = CorrelatorKey(target, base.m, base.p.add(0, 0), base.d)
            lhs2 = evaluate(with_k)
            rhs2 = (base.n - 2) * evaluate(base)
            good2 = lhs2 == rhs2
            ok = ok and good2
            lines.append(
                f"{'ok  ' if good2 else 'FAIL'} kappa00-law {target.name} "
                f"{_format_key(base)}: {lhs2} vs {rhs2}"
            )
            # kappa_{-1,divisor} insertion multiplies by the degree pairing
            alpha_div, pairing = target.divisor_class(max(base.d, 1))
            if base.d >= 1:
                with_km = CorrelatorKey(
                    target, base.m, base.p.add(-1, alpha_div), base.d
                )
                lhs3 = evaluate(with_km)
                rhs3 = pairing * evaluate(base)
                good3 = lhs3 == rhs3
                ok = ok and good3
                lines.append(
                    f"{'ok  ' if good3 else 'FAIL'} kappa-1-law {target.name} "
                    f"{_format_key(base)}: {lhs3} vs {rhs3}"
                )
    # degree-0 keys with fewer than three points vanish
    for target in targets:
        zero_key = make_key(target, tau=[(0, 0, 2)], kappa=[(-1, 1, 1)], d=0)
        good = evaluate(zero_key) == 0
        ok = ok and good
        lines.append(
            f"{'ok  ' if good else 'FAIL'} degree-0 convention {target.name}"
        )
    return ok, lines


def verify_path_independence(
    targets: list[TargetModel], samples: int, seed: int, d_max: int = 3
) -> tuple[bool, list[str]]:
    """Main evaluator versus the kappa-first route on the same key pool."""
    lines = [f"seed {seed}"]
    ok = True
    for key in sample_relation_keys(targets, samples, seed, d_max):
        main = evaluate(key)
        alt = evaluate_kappa_first(key)
        good = main == alt
        ok = ok and good
        lines.append(
            f"{'ok  ' if good else 'FAIL'} paths {key.target.name} "
            f"{_format_key(key)}: {main} vs {alt}"
        )
    return ok, lines


def verify_wdvv(r: int, q_cap: int, x_cap: int = 8) -> tuple[bool, list[str]]:
    """Associativity of the pure potential for P^r at the given window."""
    target = projective_space(r)
    caps = tuple(min(x_cap, 3) if alpha == 0 else x_cap for alpha in range(r + 1))
    potential = gw_potential_series(target, caps, q_cap)
    residuals = wdvv_residuals(potential, target)
    lines = []
    ok = True
    for quad, series in sorted(residuals.items()):
        good = series.is_zero()
        ok = ok and good
        lines.append(f"{'ok  ' if good else 'FAIL'} wdvv P{r} quadruple {quad}")
    return ok, lines


def verify_cp1(q_cap: int = 3, h_count: int = 8) -> tuple[bool, list[str]]:
    """P^1 closed form versus the engine, h-numbers, and the PDE systems."""
    lines = []
    ok = True

    hs = cp1_h_sequence(h_count)
    target = projective_space(1)
    for n in range(1, h_count + 1):
        engine = evaluate(make_key(target, kappa=[(0, 1, 2 * n - 2)], d=n))
        good = engine == hs[n - 1]
        ok = ok and good
        lines.append(
            f"{'ok  ' if good else 'FAIL'} h_{n} = {hs[n - 1]} vs engine {engine}"
        )

    spec = cp1_spec(q_cap=q_cap, var_cap=2 * q_cap, total_cap=2 * q_cap)
    from .potentials import cp1_closed_form_series

    engine_series = build_H_series(spec)
    closed = cp1_closed_form_series(q_cap, spec)
    good = engine_series == closed
    ok = ok and good
    lines.append(f"{'ok  ' if good else 'FAIL'} closed form == engine (q<={q_cap})")

    for name, residual in trr_pde_residuals(engine_series, spec):
        good = residual.is_zero()
        ok = ok and good
        lines.append(f"{'ok  ' if good else 'FAIL'} pde {name}")

    residual = cp1_penult_residual(max(q_cap, 2))
    good = residual.is_zero()
    ok = ok and good
    lines.append(f"{'ok  ' if good else 'FAIL'} q-log-derivative equation")
    return ok, lines


def verify_trees() -> tuple[bool, list[str]]:
    """Golden checks of the tree calculus."""
    lines = []
    ok = True

    def check(name, good):
        nonlocal ok
        ok = ok and good
        lines.append(f"{'ok  ' if good else 'FAIL'} {name}")

    star = DecorationStar()
    check("two identical tail-less legs swap", aut_order(star.symmetric) == 2)
    check("distinct degrees break the swap", aut_order(star.asymmetric) == 1)
    pinned = two_vertex_tree((1, 2), (3,), 1, 1)
    check("labeled tails pin the vertices", aut_order(pinned) == 1)

    # worked pushforward example: two-vertex tree, tails 1-3 left, 4-5 right
    gamma2 = Decoration("class", ("gamma2",), 2, pushable=False)
    gamma1 = Decoration("class", ("gamma1",), 2, pushable=True)
    generic = DecoratedTree(
        betas=(1, 1),
        edges=((0, 1),),
        tails=((1, 0), (2, 0), (3, 0), (4, 1), (5, 1)),
        decorations=((0, gamma2), (1, gamma1)),
    )
    pushed = forgetful_pushforward(generic, 5)
    check("generic pushforward keeps the shape", len(pushed) == 1)
    tree, coeff = next(iter(pushed.items()))
    check("generic pushforward coefficient 1", coeff == Fraction(1))
    check(
        "pushforward image token",
        any(tok.data == ("pi_*(gamma1)",) for tok in tree.decorations_at(1)),
    )

    dying = DecoratedTree(
        betas=(2, 0),
        edges=((0, 1),),
        tails=((1, 0), (2, 0), (3, 0), (4, 1), (5, 1)),
        decorations=((1, gamma1),),
    )
    check("positive-degree token dies with the vertex", len(forgetful_pushforward(dying, 5)) == 0)
    plain = DecoratedTree(
        betas=(2, 0),
        edges=((0, 1),),
        tails=((1, 0), (2, 0), (3, 0), (4, 1), (5, 1)),
    )
    stabilized = forgetful_pushforward(plain, 5)
    check("unit token stabilizes", len(stabilized) == 1)
    tree, coeff = next(iter(stabilized.items()))
    check(
        "stabilization reattaches the tail",
        tree.n_vertices == 1 and set(tree.labels) == {1, 2, 3, 4},
    )
    check("stabilization coefficient 1", coeff == Fraction(1))

    check(
        "psi_(3,2) has two divisor terms",
        len(psi_boundary_presentation(3, 2, 1)) == 2,
    )
    check(
        "psi_(3,0) vanishes",
        len(psi_boundary_presentation(3, 0, 1)) == 0,
    )
    check(
        "four-point degree-0 boundary count",
        len(enumerate_two_vertex_divisors(4, 0)) == 3,
    )
    return ok, lines


class DecorationStar:
    """Three-vertex stars used by the automorphism golden checks."""

    def __init__(self):
        self.symmetric = DecoratedTree(
            betas=(0, 1, 1),
            edges=((0, 1), (0, 2)),
            tails=((1, 0), (2, 0), (3, 0)),
        )
        self.asymmetric = DecoratedTree(
            betas=(0, 1, 2),
            edges=((0, 1), (0, 2)),
            tails=((1, 0), (2, 0), (3, 0)),
        )


SUITES = {
    "wdvv": "associativity residuals of the pure potential",
    "trr": "two-sided recursion-relation identities on random keys",
    "dilaton": "comparison relation and special-value laws",
    "cp1": "P^1 closed form, h-numbers and PDE residuals",
    "trees": "tree-calculus golden checks",
}
