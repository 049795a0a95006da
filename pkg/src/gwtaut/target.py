"""Even cohomology model of the target variety.

A ``TargetModel`` packages the Frobenius data of H*(V): a graded basis
e_0..e_r with e_0 the unit, the Poincare pairing, cup-product structure
constants, the pairing of the first Chern class against a unit curve
degree, and the handful of geometric normalizations the reconstruction
needs (pure two-point degree-one seeds and the per-unit pairing of each
divisor class against a curve degree).

Projective space P^r ships built in; arbitrary even-graded Frobenius data
can be loaded from a JSON config.  Curve degrees are plain non-negative
ints (effective multiples of the line class).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .series import parse_rational

FrMatrix = tuple[tuple[Fraction, ...], ...]


def check_degree(d: int) -> int:
    if not isinstance(d, int) or d < 0:
        raise ValueError(f"curve degree must be a non-negative integer, got {d!r}")
    return d


@dataclass(frozen=True)
class TargetModel:
    name: str
    gradings: tuple[int, ...]
    eta: FrMatrix
    cup: tuple[tuple[tuple[Fraction, ...], ...], ...]  # cup[a][b][nu]
    c1_degree: int  # pairing of c1(T_V) with the unit curve degree
    # (alpha, per-unit pairing int_1 e_alpha) for degree-2 basis classes
    divisor_pairings: tuple[tuple[int, Fraction], ...] = ()
    # normalized pure-GW seeds: ((classes...), d) -> value
    seeds: tuple[tuple[tuple[int, ...], int, Fraction], ...] = ()

    def __post_init__(self):
        n = len(self.gradings)
        if any(g % 2 != 0 or g < 0 for g in self.gradings):
            raise ValueError("only even, non-negative cohomology gradings are supported")
        if self.gradings[0] != 0:
            raise ValueError("e_0 must have grading 0")
        if len(self.eta) != n or any(len(row) != n for row in self.eta):
            raise ValueError("eta must be a square matrix on the basis")
        for a in range(n):
            for b in range(n):
                if self.eta[a][b] != self.eta[b][a]:
                    raise ValueError("eta must be symmetric")
        if len(self.cup) != n or any(
            len(plane) != n or any(len(row) != n for row in plane)
            for plane in self.cup
        ):
            raise ValueError("cup tensor must be rank (n, n, n)")
        for b in range(n):
            for nu in range(n):
                expected = Fraction(1) if nu == b else Fraction(0)
                if self.cup[0][b][nu] != expected:
                    raise ValueError("e_0 must act as the unit in the cup product")
        object.__setattr__(
            self,
            "_cached_hash",
            hash((self.name, self.gradings, self.eta, self.cup, self.c1_degree)),
        )

    def __hash__(self) -> int:  # cached; the tensors are large
        return self._cached_hash

    # -- basic ring data -----------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.gradings)

    @property
    def dim_complex(self) -> int:
        return max(self.gradings) // 2

    def grading(self, alpha: int) -> int:
        return self.gradings[alpha]

    def cup_product(self, alpha: int, beta: int) -> dict[int, Fraction]:
        """e_alpha . e_beta as {nu: coefficient}, zero entries dropped."""
        return {
            nu: c for nu, c in enumerate(self.cup[alpha][beta]) if c != 0
        }

    def cup_vector(self, vec: dict[int, Fraction], alpha: int) -> dict[int, Fraction]:
        """Cup a formal basis combination with e_alpha."""
        out: dict[int, Fraction] = {}
        for mu, c in vec.items():
            for nu, d in enumerate(self.cup[mu][alpha]):
                if d:
                    out[nu] = out.get(nu, Fraction(0)) + c * d
        return {nu: c for nu, c in out.items() if c != 0}

    def poincare_pairing(self, alpha: int, beta: int) -> Fraction:
        return self.eta[alpha][beta]

    def inverse_pairing(self, sigma1: int, sigma2: int) -> Fraction:
        return _eta_inverse(self)[sigma1][sigma2]

    def eta_inverse_pairs(self) -> tuple[tuple[int, int, Fraction], ...]:
        """Nonzero entries (sigma1, sigma2, eta^{sigma1 sigma2})."""
        return _eta_inverse_pairs(self)

    def triple_integral(self, a: int, b: int, c: int) -> Fraction:
        """int_V e_a e_b e_c, via cup and the pairing."""
        return sum(
            (coef * self.eta[nu][c] for nu, coef in self.cup_product(a, b).items()),
            Fraction(0),
        )

    # -- moduli bookkeeping -----------------------------------------------------

    def moduli_dimension(self, n: int, d: int) -> int:
        """Complex dimension of the n-pointed degree-d stable map space."""
        check_degree(d)
        if n < 0:
            raise ValueError("n must be non-negative")
        if d == 0 and n < 3:
            raise ValueError(f"unstable input: n={n}, d=0")
        return self.dim_complex + n - 3 + d * self.c1_degree

    def integral_over_beta(self, alpha: int, d: int) -> Fraction:
        """Pairing of a divisor class with the degree-d curve class."""
        check_degree(d)
        if self.gradings[alpha] != 2:
            raise ValueError(
                f"integral_over_beta needs a degree-2 class, |e_{alpha}| = "
                f"{self.gradings[alpha]}"
            )
        for idx, per_unit in self.divisor_pairings:
            if idx == alpha:
                return per_unit * d
        raise ValueError(f"no divisor pairing configured for e_{alpha}")

    def divisor_class(self, d: int) -> tuple[int, Fraction]:
        """Least degree-2 basis class pairing nontrivially with degree d > 0."""
        for idx, per_unit in sorted(self.divisor_pairings):
            if per_unit * d != 0:
                return idx, per_unit * d
        raise ValueError(
            f"target {self.name!r} has no divisor class with nonzero pairing "
            f"against degree {d}"
        )

    def seed_value(self, classes: tuple[int, ...], d: int) -> Fraction | None:
        for cls, deg, value in self.seeds:
            if cls == classes and deg == d:
                return value
        return None

    @property
    def is_monogenic(self) -> bool:
        """True when the basis is 1, h, h^2, ... with h the hyperplane class."""
        r = self.rank - 1
        if self.gradings != tuple(2 * i for i in range(r + 1)):
            return False
        for a in range(r + 1):
            for b in range(r + 1):
                expect = a + b if a + b <= r else None
                for nu in range(r + 1):
                    want = Fraction(1) if nu == expect else Fraction(0)
                    if self.cup[a][b][nu] != want:
                        return False
        return True


@lru_cache(maxsize=None)
def _eta_inverse(target: TargetModel) -> FrMatrix:
    """Exact inverse of eta by Gauss-Jordan elimination over Fraction."""
    n = target.rank
    aug = [
        [target.eta[i][j] for j in range(n)]
        + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("eta is degenerate")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


@lru_cache(maxsize=None)
def _eta_inverse_pairs(target: TargetModel) -> tuple[tuple[int, int, Fraction], ...]:
    inv = _eta_inverse(target)
    return tuple(
        (s1, s2, inv[s1][s2])
        for s1 in range(target.rank)
        for s2 in range(target.rank)
        if inv[s1][s2] != 0
    )


@lru_cache(maxsize=None)
def projective_space(r: int) -> TargetModel:
    """H*(P^r) with basis the powers of the hyperplane class."""
    if r < 1:
        raise ValueError("projective space needs r >= 1")
    gradings = tuple(2 * i for i in range(r + 1))
    eta = tuple(
        tuple(Fraction(1) if a + b == r else Fraction(0) for b in range(r + 1))
        for a in range(r + 1)
    )
    cup = tuple(
        tuple(
            tuple(
                Fraction(1) if (a + b <= r and nu == a + b) else Fraction(0)
                for nu in range(r + 1)
            )
            for b in range(r + 1)
        )
        for a in range(r + 1)
    )
    seed_classes = (r, r) if r >= 2 else ()
    return TargetModel(
        name=f"P{r}",
        gradings=gradings,
        eta=eta,
        cup=cup,
        c1_degree=r + 1,
        divisor_pairings=((1, Fraction(1)),),
        seeds=((seed_classes, 1, Fraction(1)),),
    )


def target_from_config(config: dict) -> TargetModel:
    """Build a target from its JSON config.

    {"type": "projective_space", "r": 2} or
    {"type": "custom", "gradings": [...], "eta": [...], "cup": [...],
     "c1_degree": k, "divisor_pairings": [[alpha, "p/q"], ...],
     "seeds": [[[classes], d, "p/q"], ...]}
    """
    kind = config.get("type")
    if kind == "projective_space":
        return projective_space(int(config["r"]))
    if kind == "custom":
        def rat(x):
            return parse_rational(x) if isinstance(x, str) else Fraction(x)

        gradings = tuple(int(g) for g in config["gradings"])
        eta = tuple(tuple(rat(x) for x in row) for row in config["eta"])
        cup = tuple(
            tuple(tuple(rat(x) for x in row) for row in plane)
            for plane in config["cup"]
        )
        pairings = tuple(
            (int(alpha), rat(value))
            for alpha, value in config.get("divisor_pairings", [])
        )
        seeds = tuple(
            (tuple(int(c) for c in classes), int(d), rat(value))
            for classes, d, value in config.get("seeds", [])
        )
        return TargetModel(
            name=config.get("name", "custom"),
            gradings=gradings,
            eta=eta,
            cup=cup,
            c1_degree=int(config["c1_degree"]),
            divisor_pairings=pairings,
            seeds=seeds,
        )
    raise ValueError(f"unknown target type {kind!r}")
