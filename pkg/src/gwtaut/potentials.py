"""Generating functions and their differential-equation checks.

``build_H_series`` assembles the truncated twisted potential
H = sum 1/m! 1/p! <tau^m kappa^p>_d t^m s^p q^d over an active variable
set; ``wdvv_residuals`` checks associativity of a plain potential;
``trr_pde_residuals`` checks the recursion relations in differential
form; and the P^1 helpers reproduce the closed-form solution, its
h-number recursion, and the single q-log-derivative equation the
recursions collapse to.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial

from .correlators import CorrelatorKey, MultiIndex, evaluate
from .series import QSeries, Truncation, Variable, VarRegistry
from .target import TargetModel, projective_space

Entry = tuple[int, int]

ZERO = Fraction(0)


@dataclass(frozen=True)
class PotentialSpec:
    """Active variables and truncation bounds for an H-series build."""

    target: TargetModel
    t_entries: tuple[Entry, ...]
    s_entries: tuple[Entry, ...]
    caps: tuple[int, ...]  # aligned with t_entries + s_entries
    q_cap: int
    total_cap: int | None = None

    def __post_init__(self):
        if len(self.caps) != len(self.t_entries) + len(self.s_entries):
            raise ValueError("one cap per active variable is required")
        if len(set(self.t_entries)) != len(self.t_entries):
            raise ValueError("duplicate t entry")
        if len(set(self.s_entries)) != len(self.s_entries):
            raise ValueError("duplicate s entry")

    def context(self) -> tuple[VarRegistry, Truncation]:
        t = self.target
        variables = [
            Variable("t", a, alpha, 2 * a - 2 + t.gradings[alpha])
            for a, alpha in self.t_entries
        ]
        variables += [
            Variable("s", a, alpha, 2 * a + t.gradings[alpha])
            for a, alpha in self.s_entries
        ]
        variables.append(Variable("q", 0, 0, -2 * t.c1_degree))
        registry = VarRegistry(variables)
        trunc = Truncation(self.caps + (self.q_cap,), self.total_cap)
        return registry, trunc


def make_spec(
    target: TargetModel,
    t_entries,
    s_entries,
    var_cap: int,
    q_cap: int,
    total_cap: int | None = None,
) -> PotentialSpec:
    t_entries = tuple(sorted(t_entries))
    s_entries = tuple(sorted(s_entries))
    caps = tuple([var_cap] * (len(t_entries) + len(s_entries)))
    return PotentialSpec(target, t_entries, s_entries, caps, q_cap, total_cap)


def cp1_spec(q_cap: int = 3, var_cap: int = 6, total_cap: int | None = 6) -> PotentialSpec:
    """The five-variable P^1 window: x0, x1, s_{-1}^1, s_0^0, s_0^1."""
    return make_spec(
        projective_space(1),
        t_entries=((0, 0), (0, 1)),
        s_entries=((-1, 1), (0, 0), (0, 1)),
        var_cap=var_cap,
        q_cap=q_cap,
        total_cap=total_cap,
    )


def _spec_cells(spec: PotentialSpec):
    registry, trunc = spec.context()
    target = spec.target
    target_grading = 2 * (target.dim_complex - 3)
    n_t = len(spec.t_entries)
    n_s = len(spec.s_entries)
    gradings = [v.grading for v in registry]
    cells = []
    for exps in product(*(range(c + 1) for c in trunc.caps)):
        if all(e == 0 for e in exps):
            continue
        if spec.total_cap is not None and sum(exps[:-1]) > spec.total_cap:
            continue
        if sum(e * g for e, g in zip(exps, gradings)) != target_grading:
            continue
        m = MultiIndex(
            tuple(
                (entry, exps[i])
                for i, entry in enumerate(spec.t_entries)
                if exps[i]
            )
        )
        p = MultiIndex(
            tuple(
                (entry, exps[n_t + i])
                for i, entry in enumerate(spec.s_entries)
                if exps[n_t + i]
            )
        )
        d = exps[n_t + n_s]
        cells.append((exps, m, p, d))
    return registry, trunc, cells


def build_H_series(spec: PotentialSpec, jobs: int = 1) -> QSeries:
    """Assemble the twisted potential over the spec's window.

    Every monomial with the correct homogeneity is filled with the exact
    correlator value weighted by 1/m! 1/p!.
    """
    registry, trunc, cells = _spec_cells(spec)
    target = spec.target

    def cell_value(cell):
        exps, m, p, d = cell
        value = evaluate(CorrelatorKey(target, m, p, d))
        if value == 0:
            return exps, ZERO
        return exps, value / (m.factorial() * p.factorial())

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(cell_value, cells))
    else:
        results = [cell_value(cell) for cell in cells]
    terms = {exps: coeff for exps, coeff in results if coeff != 0}
    return QSeries(registry, trunc, terms)


# -- P^1 closed form ---------------------------------------------------------------


def cp1_h_sequence(n_terms: int) -> list[Fraction]:
    """h_1..h_N of the P^1 closed form, from the quadratic recursion."""
    if n_terms < 1:
        raise ValueError("need at least one term")
    hs = [Fraction(1)]
    for n in range(1, n_terms):
        acc = ZERO
        for ell in range(1, n + 1):
            acc += (
                Fraction(
                    factorial(2 * n - 1) * ell**2 * (n + 1 - ell) ** 2,
                    factorial(2 * ell - 2) * factorial(2 * (n - ell)) * (n + 1),
                )
                * hs[ell - 1]
                * hs[n - ell]
            )
        hs.append(acc)
    return hs


def cp1_closed_form_series(
    n_terms: int,
    spec: PotentialSpec,
    include_classical: bool = True,
    hs: list[Fraction] | None = None,
) -> QSeries:
    """The P^1 potential from its closed form, on the spec's window.

    Sums e^{-2 s00} qt^n (s01)^{2n-2} h_n / (2n-2)! with
    qt = q exp(s_{-1}^1 + e^{s00} (x1 + s01 x0)), plus the degree-0
    cubic part when requested.
    """
    if spec.t_entries != ((0, 0), (0, 1)) or spec.s_entries != (
        (-1, 1),
        (0, 0),
        (0, 1),
    ):
        raise ValueError("the closed form needs the five-variable P^1 spec")
    registry, trunc = spec.context()

    def var(kind, a, alpha):
        return QSeries.variable(registry, trunc, kind, a, alpha)

    x0, x1 = var("t", 0, 0), var("t", 0, 1)
    sm11, s00, s01 = var("s", -1, 1), var("s", 0, 0), var("s", 0, 1)
    q = var("q", 0, 0)

    arg = sm11 + s00.exp() * (x1 + s01 * x0)
    damp = (s00 * (-2)).exp()
    n_max = min(n_terms, spec.q_cap)
    hs = hs or cp1_h_sequence(max(n_max, 1))
    acc = QSeries.zero(registry, trunc)
    q_power = QSeries.one(registry, trunc)
    s01_sq = s01 * s01
    s01_power = QSeries.one(registry, trunc)
    for n in range(1, n_max + 1):
        q_power = q_power * q
        if n > 1:
            s01_power = s01_power * s01_sq
        term = damp * q_power * (arg * n).exp() * s01_power
        acc = acc + term * Fraction(hs[n - 1], factorial(2 * n - 2))
    if include_classical:
        cubic = x0 * x0 * x1 * Fraction(1, 2) + x0 * x0 * x0 * s01 * Fraction(1, 6)
        acc = acc + s00.exp() * cubic
    return acc


def cp1_penult_residual(
    n_terms: int, hs: list[Fraction] | None = None
) -> QSeries:
    """Residual of d(H'')/ds01 - 2 s01 H'' H''' - x0 H''' through q^N.

    H is the closed form restricted to x0, x1, s01 and q; primes are
    q d/dq.  Zero exactly when the h-numbers satisfy their recursion.
    """
    if n_terms < 1:
        raise ValueError("need at least one q order")
    target = projective_space(1)
    registry = VarRegistry(
        [
            Variable("t", 0, 0, -2),
            Variable("t", 0, 1, 0),
            Variable("s", 0, 1, 2),
            Variable("q", 0, 0, -4),
        ]
    )
    s01_cap = max(2 * n_terms - 1, 1)
    trunc = Truncation((n_terms, n_terms, s01_cap, n_terms), None)

    def var(kind, a, alpha):
        return QSeries.variable(registry, trunc, kind, a, alpha)

    x0, x1, s01, q = var("t", 0, 0), var("t", 0, 1), var("s", 0, 1), var("q", 0, 0)
    arg = x1 + s01 * x0
    hs = hs or cp1_h_sequence(n_terms)
    h_tilde = QSeries.zero(registry, trunc)
    q_power = QSeries.one(registry, trunc)
    s01_power = QSeries.one(registry, trunc)
    for n in range(1, n_terms + 1):
        q_power = q_power * q
        if n > 1:
            s01_power = s01_power * s01 * s01
        h_tilde = h_tilde + q_power * (arg * n).exp() * s01_power * Fraction(
            hs[n - 1], factorial(2 * n - 2)
        )
    h2 = h_tilde.q_log_derivative().q_log_derivative()
    h3 = h2.q_log_derivative()
    window = Truncation(
        (n_terms - 1, n_terms - 1, max(s01_cap - 2, 0), n_terms), None
    )
    lhs = h2.partial_derivative("s", 0, 1).restrict(window)
    rhs = (s01 * h2 * h3 * 2 + x0 * h3).restrict(window)
    return lhs - rhs


# -- residual systems ---------------------------------------------------------------


def _window(registry: VarRegistry, trunc: Truncation, drop: int) -> Truncation:
    qi = registry.q_index()
    caps = tuple(
        c if i == qi else max(c - drop, 0) for i, c in enumerate(trunc.caps)
    )
    total = trunc.total_cap
    if total is not None:
        total = max(total - drop, 0)
    return Truncation(caps, total)


def wdvv_residuals(
    potential: QSeries, target: TargetModel
) -> dict[tuple[int, int, int, int], QSeries]:
    """Associativity residuals, one series per index quadruple (a, b, c, d).

    The quadruple residual is sum_{e,f} eta^{ef} (F_abe F_fcd - F_bce F_fad),
    computed on the window where all third partials are exact.
    """
    registry = potential.registry
    rank = target.rank
    window = _window(registry, potential.trunc, 3)

    third: dict[tuple[int, int, int], QSeries] = {}
    for tri in combinations_with_replacement(range(rank), 3):
        series = potential
        for alpha in tri:
            series = series.partial_derivative("t", 0, alpha)
        third[tri] = series.restrict(window)

    def d3(a, b, c):
        return third[tuple(sorted((a, b, c)))]

    out = {}
    pairs = target.eta_inverse_pairs()
    for a in range(rank):
        for c in range(a + 1, rank):
            for b in range(rank):
                for dd in range(rank):
                    residual = QSeries.zero(registry, window)
                    for e, f, w in pairs:
                        residual = residual + (
                            d3(a, b, e) * d3(f, c, dd)
                            - d3(b, c, e) * d3(f, a, dd)
                        ) * w
                    out[(a, b, c, dd)] = residual
    return out


def wdvv_residual(potential: QSeries, target: TargetModel) -> QSeries:
    """Sum of the quadruple residuals over the canonical index list."""
    residuals = wdvv_residuals(potential, target)
    registry = potential.registry
    window = _window(registry, potential.trunc, 3)
    total = QSeries.zero(registry, window)
    for quad in sorted(residuals):
        total = total + residuals[quad]
    return total


def trr_pde_residuals(
    h_series: QSeries, spec: PotentialSpec
) -> list[tuple[str, QSeries]]:
    """Residuals of the three recursion-relation PDE families.

    Instances are enumerated over the spec's active variables; an
    instance whose cross-reference variable is inactive is skipped,
    except that derivatives by s_{-1}^0 are identically zero (the
    kappa_{-1} class of the unit vanishes).
    """
    target = spec.target
    registry = h_series.registry
    window = _window(registry, h_series.trunc, 3)
    t_act = set(spec.t_entries)
    s_act = set(spec.s_entries)
    rank = target.rank
    pairs = target.eta_inverse_pairs()
    sigma_ok = all((0, s) in t_act for s in range(rank))

    def dt(series, entry):
        return series.partial_derivative("t", *entry)

    def ds(series, entry):
        return series.partial_derivative("s", *entry)

    def zero():
        return QSeries.zero(registry, window)

    co_pairs = list(combinations_with_replacement(sorted(t_act), 2))
    out: list[tuple[str, QSeries]] = []

    def eta_term(second_factor_fn, e2, e3):
        acc = zero()
        for s1, s2, w in pairs:
            left = second_factor_fn(s1)
            if left is None:
                return None
            right = dt(dt(dt(h_series, (0, s2)), e2), e3).restrict(window)
            acc = acc + (left * right) * w
        return acc

    for (a2, alpha2), (a3, alpha3) in co_pairs:
        e2, e3 = (a2, alpha2), (a3, alpha3)
        if sigma_ok:
            # family 1: psi pivots
            for a1, alpha1 in sorted(t_act):
                if a1 < 1 or (a1 - 1, alpha1) not in t_act:
                    continue
                lhs = dt(dt(dt(h_series, (a1, alpha1)), e2), e3).restrict(window)
                rhs = eta_term(
                    lambda s1: dt(dt(h_series, (a1 - 1, alpha1)), (0, s1)).restrict(
                        window
                    ),
                    e2,
                    e3,
                )
                out.append((f"t{a1},{alpha1}|t{a2},{alpha2}|t{a3},{alpha3}", lhs - rhs))
            # family 2: kappa pivots of level >= 1
            for a1, alpha1 in sorted(s_act):
                if a1 < 1 or (a1 - 1, alpha1) not in s_act:
                    continue
                lhs = dt(dt(ds(h_series, (a1, alpha1)), e2), e3).restrict(window)
                rhs = eta_term(
                    lambda s1: ds(dt(h_series, (0, s1)), (a1 - 1, alpha1)).restrict(
                        window
                    ),
                    e2,
                    e3,
                )
                out.append((f"s{a1},{alpha1}|t{a2},{alpha2}|t{a3},{alpha3}", lhs - rhs))
            # family 3: kappa pivots of level 0, with the cup correction
            for a1, alpha1 in sorted(s_act):
                if a1 != 0:
                    continue
                if (-1, alpha1) in s_act:
                    rhs = eta_term(
                        lambda s1: ds(dt(h_series, (0, s1)), (-1, alpha1)).restrict(
                            window
                        ),
                        e2,
                        e3,
                    )
                elif alpha1 == 0:
                    rhs = zero()  # kappa_{-1} of the unit vanishes
                else:
                    continue
                expressible = True
                correction = zero()
                for a, alpha in sorted(t_act):
                    for nu, c_nu in target.cup_product(alpha, alpha1).items():
                        if (a, nu) not in t_act:
                            expressible = False
                            break
                        piece = dt(dt(dt(h_series, (a, nu)), e2), e3)
                        piece = piece.multiply_variable("t", a, alpha)
                        correction = correction + piece.restrict(window) * c_nu
                    if not expressible:
                        break
                if not expressible or rhs is None:
                    continue
                lhs = dt(dt(ds(h_series, (0, alpha1)), e2), e3).restrict(window)
                out.append(
                    (
                        f"s0,{alpha1}|t{a2},{alpha2}|t{a3},{alpha3}",
                        lhs - rhs - correction,
                    )
                )
    return out
