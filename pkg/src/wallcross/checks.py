"""Randomized identity suites behind ``wallcross check``.

Every suite takes a seeded random.Random and returns CheckResult rows; a failing row is also logged at ERROR.
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional

from wallcross import curve
from wallcross.coefficients import (
    enumerate_trees,
    inversion_sums,
    lie_membership,
    s_closed_form_dominant,
    s_closed_form_reverse,
    s_coeff,
    s_coeff_alt,
    t_coeff,
    u_coeff,
    u_word_sum,
    v_coeff,
)
from wallcross.engine import (
    J_OMEGA,
    AntisymmetrizedPairing,
    InvariantTable,
    iss_config,
    j_from_iss,
    lattice_enumerator,
    table_j_from_iss,
    table_iss_from_j,
    table_project_omega,
    table_wallcross_iss,
    wallcross_config,
    wallcross_iss,
    wallcross_j,
    wallcross_j_omega,
)
from wallcross.errors import InputError
from wallcross.lambda_ring import TruncatedSeries, eval_at, project_omega
from wallcross.quiver import (
    QuiverPresentation,
    euler_form,
    ff_count_semistable,
    iss_semistable,
    iss_semistable_via_wallcross,
    quiver_enumerator,
    semistable_table,
    trivial_table,
)
from wallcross.stability import (
    ADatum,
    KClass,
    QuiverLattice,
    WeakStability,
    class_sum,
    dominates,
    enumerate_posets,
    is_dominant,
)
from wallcross.utils.combinatorics import compositions, split_blocks, surjections
from wallcross.utils.parallel import parallel_reduce

DEFAULT_SEED = 7
DEFAULT_MAX_N = 4
CASES = 100
TREE_CASES = 3


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


class _Recorder:
    def __init__(self, suite: str):
        self.suite = suite
        self.rows: List[CheckResult] = []

    def __call__(self, name: str, passed: bool, detail: str = ""):
        if not passed:
            logging.error(f"check {self.suite}/{name} failed: {detail}")
        self.rows.append(CheckResult(self.suite, name, bool(passed), detail))


def random_class(rng: random.Random, rank: int = 2, top: int = 2) -> KClass:
    while True:
        coords = tuple(rng.randint(0, top) for _ in range(rank))
        if any(coords):
            return KClass(coords)


def random_slope(rng: random.Random, rank: int = 2) -> WeakStability:
    return WeakStability.slope(
        [rng.randint(-2, 2) for _ in range(rank)],
        [rng.randint(1, 2) for _ in range(rank)],
    )


def random_datum(rng: random.Random, n: int, rank: int = 2) -> ADatum:
    return ADatum(tuple(random_class(rng, rank, top=1) for _ in range(n)))


def floor_stability(stab: WeakStability, classes) -> WeakStability:
    """Values stability floor(stab) on the given classes; it dominates stab."""
    return WeakStability.values({k: Fraction(math.floor(stab(k).slope)) for k in classes})


def _merged(d: ADatum, sizes) -> ADatum:
    return ADatum(tuple(class_sum(block) for block in split_blocks(d.parts, sizes)))


def s_extremes_witness(d: ADatum, tau, tau_tilde) -> bool:
    """First tau-minimal part sits at or above the total in tau_tilde; last tau-maximal part at or below."""
    values = [tau(k) for k in d]
    low = values.index(min(values))
    high = len(values) - 1 - values[::-1].index(max(values))
    target = tau_tilde(d.total())
    return tau_tilde(d[low]) >= target and tau_tilde(d[high]) <= target


def s_composition_sum(d: ADatum, tau, tau_hat, tau_tilde) -> int:
    total = 0
    for sizes in compositions(len(d)):
        inner = 1
        for block in split_blocks(d.parts, sizes):
            inner *= s_coeff(ADatum(block), tau, tau_hat)
        if inner:
            total += inner * s_coeff(_merged(d, sizes), tau_hat, tau_tilde)
    return total


def u_composition_sum(d: ADatum, tau, tau_hat, tau_tilde) -> Fraction:
    total = Fraction(0)
    for sizes in compositions(len(d)):
        inner = Fraction(1)
        for block in split_blocks(d.parts, sizes):
            inner *= u_coeff(ADatum(block), tau, tau_hat)
        if inner:
            total += inner * u_coeff(_merged(d, sizes), tau_hat, tau_tilde)
    return total


def t_composition_sum(poset, kappa, K, phi, tau, tau_hat, tau_tilde) -> Fraction:
    """Sum over intermediate surjections psi: I -> [m] with phi = xi o psi, weighted 1/m!."""
    n = poset.n
    total = Fraction(0)
    for m in range(len(K), n + 1):
        for psi in surjections(n, m):
            labels: Dict[int, object] = {}
            if any(labels.setdefault(a, phi[i]) != phi[i] for i, a in enumerate(psi)):
                continue
            xi = [labels[a] for a in range(m)]
            induced = is_dominant(poset, list(range(m)), psi)
            if induced is None or is_dominant(induced, K, xi) is None:
                continue
            lower = t_coeff(poset, kappa, list(range(m)), psi, tau, tau_hat)
            if not lower:
                continue
            lam = [class_sum(kappa[i] for i in range(n) if psi[i] == a) for a in range(m)]
            upper = t_coeff(induced, lam, K, xi, tau_hat, tau_tilde)
            total += Fraction(lower * upper, factorial(m))
    return total


def suite_coeffs(rng: random.Random, max_n: int) -> List[CheckResult]:
    record = _Recorder("coeffs")
    for case in range(CASES):
        n = rng.randint(1, max_n)
        d = random_datum(rng, n)
        tau, tau_hat, tau_tilde = (random_slope(rng) for _ in range(3))
        label = f"{case}:{d}"

        s = s_coeff(d, tau, tau_tilde)
        alt = s_coeff_alt(d, tau, tau_tilde)
        record(f"s_alt[{label}]", s == alt, f"S={s} alt={alt}")
        if s:
            record(f"s_extremes[{label}]", s_extremes_witness(d, tau, tau_tilde), f"S={s}")
        unit = int(n == 1)
        record(f"s_identity[{label}]", s_coeff(d, tau, tau) == unit)
        record(f"u_identity[{label}]", u_coeff(d, tau, tau) == unit)

        comp = s_composition_sum(d, tau, tau_hat, tau_tilde)
        record(f"s_compose[{label}]", comp == s, f"S={s} composed={comp}")

        u = u_coeff(d, tau, tau_tilde)
        ucomp = u_composition_sum(d, tau, tau_hat, tau_tilde)
        record(f"u_compose[{label}]", ucomp == u, f"U={u} composed={ucomp}")

        record(f"u_lie[{label}]", lie_membership(u_word_sum(d.parts, tau, tau_tilde)))

        classes = QuiverLattice(2).classes_below(d.total())
        dominant = floor_stability(tau, classes)
        record(f"dominates[{label}]", dominates(dominant, tau, classes))
        fwd, fwd_closed = s_coeff(d, tau, dominant), s_closed_form_dominant(d, tau, dominant)
        record(f"s_dominant[{label}]", fwd == fwd_closed, f"S={fwd} closed={fwd_closed}")
        rev, rev_closed = s_coeff(d, dominant, tau), s_closed_form_reverse(d, dominant, tau)
        record(f"s_reverse[{label}]", rev == rev_closed, f"S={rev} closed={rev_closed}")

    for n in range(1, max_n + 2):
        for sizes in compositions(n):
            expected = Fraction(1 if all(s == 1 for s in sizes) else 0)
            got = inversion_sums(sizes)
            record(f"inversion{sizes}", got == (expected, expected), f"got {got}")

    for case in range(CASES):
        n = rng.randint(1, min(max_n, 3))
        posets = list(enumerate_posets(n))
        poset = rng.choice(posets)
        kappa = list(random_datum(rng, n).parts)
        m = rng.randint(1, n)
        phi = list(rng.choice(list(surjections(n, m))))
        K = list(range(m))
        if is_dominant(poset, K, phi) is None:
            continue
        tau, tau_hat, tau_tilde = (random_slope(rng) for _ in range(3))
        same = t_coeff(poset, kappa, K, phi, tau, tau)
        record(f"t_identity[{case}:{poset!r}:{phi}]", same == int(m == n), f"T={same}")
        direct = t_coeff(poset, kappa, K, phi, tau, tau_tilde)
        composed = t_composition_sum(poset, kappa, K, phi, tau, tau_hat, tau_tilde)
        record(f"t_compose[{case}:{poset!r}]", composed == direct, f"T={direct} composed={composed}")

    for n in range(2, min(max_n, 4) + 1):
        for _ in range(TREE_CASES):
            kappa = random_datum(rng, n).parts
            tau, tau_tilde = random_slope(rng), random_slope(rng)
            for tree in enumerate_trees(n, "increasing"):
                base = v_coeff(tree, kappa, tau, tau_tilde)
                for mask in range(1, 1 << len(tree.edges)):
                    which = [k for k in range(len(tree.edges)) if mask >> k & 1]
                    flipped = v_coeff(tree.reversed_edges(which), kappa, tau, tau_tilde)
                    expected = base if len(which) % 2 == 0 else -base
                    record(
                        f"v_reversal[{tree}:{which}]",
                        flipped == expected,
                        f"V={base} reversed={flipped}",
                    )
    return record.rows


ENGINE_CASES = (
    (QuiverPresentation.kronecker(), (1, 1)),
    (QuiverPresentation.kronecker(), (2, 1)),
    (QuiverPresentation.kronecker(), (1, 2)),
    (QuiverPresentation.a2(), (2, 1)),
    (QuiverPresentation.one_vertex(), (3,)),
)


def suite_engine(rng: random.Random, max_n: int) -> List[CheckResult]:
    record = _Recorder("engine")
    for quiver, alpha in ENGINE_CASES:
        if sum(alpha) > max_n:
            continue
        alpha = KClass(alpha)
        chi = euler_form(quiver)
        enum = quiver_enumerator(quiver)
        classes = quiver.lattice.classes_below(alpha)
        tau1, tau2 = random_slope(rng, quiver.rank), random_slope(rng, quiver.rank)
        label = f"{quiver.arrows}:{alpha}"

        iss1 = semistable_table(quiver, alpha, tau1)
        j1 = table_j_from_iss(classes, tau1, iss1, chi, enum)
        back = table_iss_from_j(classes, tau1, j1, chi, enum)
        record(f"inversion[{label}]", back == iss1)

        step = table_wallcross_iss(classes, tau1, tau2, iss1, chi, enum)
        direct = wallcross_iss(alpha, WeakStability.trivial(), tau2, trivial_table(quiver, alpha), chi, enum)
        record(f"path[{label}]", step[alpha] == direct, f"{step[alpha]} vs {direct}")
        record(f"semistable[{label}]", direct == iss_semistable(quiver, alpha, tau2))

        j2 = j_from_iss(alpha, tau2, step, chi, enum)
        j_moved = wallcross_j(alpha, tau1, tau2, j1, chi, enum)
        record(f"j_wallcross[{label}]", j_moved == j2, f"{j_moved} vs {j2}")

        if len(classes) <= 6:
            size = rng.randint(1, 2)
            K = rng.choice(list(enumerate_posets(size)))
            mu = [rng.choice(classes) for _ in range(size)]
            lhs = wallcross_config(K, mu, tau1, tau2, iss1, chi, enum)
            rhs = iss_config(K, mu, step, chi)
            record(f"config[{label}:{K!r}]", lhs == rhs, f"{lhs} vs {rhs}")
    return record.rows


QUIVER_CASES = (
    ("one-vertex", (1,)),
    ("one-vertex", (2,)),
    ("a2", (1, 1)),
    ("kronecker", (1, 1)),
    ("kronecker", (2, 1)),
    ("kronecker", (1, 2)),
    ("kronecker-3", (1, 1)),
)


def suite_quiver(
    rng: random.Random, max_n: int, jobs: Optional[int] = None, fields=(2, 3)
) -> List[CheckResult]:
    record = _Recorder("quiver")
    for name, alpha in QUIVER_CASES:
        if sum(alpha) > max_n:
            continue
        quiver = QuiverPresentation.preset(name)
        stab = random_slope(rng, quiver.rank)
        value = iss_semistable(quiver, alpha, stab)
        record(
            f"wallcross_path[{name}:{alpha}]",
            value == iss_semistable_via_wallcross(quiver, alpha, stab),
        )
        for q in fields:
            expected = eval_at(value, q)
            counted = ff_count_semistable(quiver, alpha, stab, q, jobs=jobs)
            record(
                f"oracle[{name}:{alpha}:q={q}:{stab}]",
                counted == expected,
                f"formula {expected} oracle {counted}",
            )
    return record.rows


def suite_curve(rng: random.Random, max_n: int, floor: int = -16) -> List[CheckResult]:
    record = _Recorder("curve")
    z2_minus_1 = TruncatedSeries({2: 1, 0: -1})
    for g in (0, 1, 2):
        jac = TruncatedSeries({j: math.comb(2 * g, j) for j in range(2 * g + 1)})
        line = jac.divide_by_polynomial(z2_minus_1, floor)
        record(f"rank_one[g={g}]", curve.iss_delta(1, 0, g, floor) == line)
        for n in range(1, min(max_n, 3) + 1):
            d = rng.randint(-3, 3)
            label = f"n={n},d={d},g={g}"
            delta = curve.iss_delta(n, d, g, floor)
            record(f"macdonald[{label}]", delta == curve.iss_delta_macdonald(n, g, floor))
            gamma = curve.iss_gamma(n, d, g, floor)
            direct = curve.iss_gamma_direct(n, d, g, floor)
            record(f"two_path[{label}]", gamma == direct, f"{gamma} vs {direct}")
            deeper = curve.iss_gamma(n, d, g, floor - 4)
            record(f"floor_stable[{label}]", deeper.agrees_with(gamma, floor))
            record(f"reconstruct[{label}]", curve.reconstruct_delta(n, d, g, floor) == delta)
            record(
                f"tensor[{label}]",
                curve.iss_gamma_direct(n, d + n, g, floor) == direct,
            )
    for n, d in ((2, 1), (3, 1)):
        if n > max_n:
            continue
        try:
            poly = curve.coprime_poincare(n, d, 2)
            record(f"poincare[{n},{d}]", curve.betti_numbers(poly)[0] == 1, str(poly))
        except Exception as e:
            record(f"poincare[{n},{d}]", False, str(e))
    return record.rows


def suite_cy3(rng: random.Random, max_n: int) -> List[CheckResult]:
    record = _Recorder("cy3")
    lattice = QuiverLattice(2)
    for case in range(CASES // 2):
        alpha = random_class(rng, 2, top=2)
        if sum(alpha) > max_n:
            continue
        a = rng.randint(-2, 2)
        chi_bar = AntisymmetrizedPairing([[0, a], [-a, 0]])
        table = InvariantTable(
            J_OMEGA,
            {k: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for k in lattice.classes_below(alpha)},
        )
        tau, tau_tilde = random_slope(rng), random_slope(rng)
        enum = lattice_enumerator(lattice)
        trees = wallcross_j_omega(alpha, tau, tau_tilde, table, chi_bar, enum, "oriented")
        increasing = wallcross_j_omega(alpha, tau, tau_tilde, table, chi_bar, enum, "increasing")
        record(f"tree_modes[{case}:{alpha}]", trees == increasing, f"{trees} vs {increasing}")

    for quiver, alpha in ENGINE_CASES:
        if sum(alpha) > max_n:
            continue
        alpha = KClass(alpha)
        chi = euler_form(quiver)
        enum = quiver_enumerator(quiver)
        classes = quiver.lattice.classes_below(alpha)
        tau, tau_tilde = random_slope(rng, quiver.rank), random_slope(rng, quiver.rank)
        j_table = table_j_from_iss(classes, tau, semistable_table(quiver, alpha, tau), chi, enum)
        projected = project_omega(wallcross_j(alpha, tau, tau_tilde, j_table, chi, enum))
        trees = wallcross_j_omega(
            alpha, tau, tau_tilde, table_project_omega(j_table), chi.antisymmetrize(), enum
        )
        record(f"projection[{quiver.arrows}:{alpha}]", projected == trees, f"{projected} vs {trees}")
    return record.rows


SUITES: Dict[str, Callable[..., List[CheckResult]]] = {
    "coeffs": suite_coeffs,
    "engine": suite_engine,
    "quiver": suite_quiver,
    "curve": suite_curve,
    "cy3": suite_cy3,
}


def run_checks(
    suite: str = "all",
    seed: int = DEFAULT_SEED,
    max_n: int = DEFAULT_MAX_N,
    jobs: Optional[int] = None,
) -> List[CheckResult]:
    """Run one suite or all of them; each suite gets its own Random(seed)."""
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise InputError(f"unknown suite: {suite}")

    def run(name: str) -> List[CheckResult]:
        rng = random.Random(seed)
        logging.info(f"Running check suite {name} (seed={seed}, max_n={max_n})")
        return SUITES[name](rng, max_n)

    rows = parallel_reduce(run, names, jobs, start=[])
    order = {name: i for i, name in enumerate(names)}
    return sorted(rows, key=lambda r: order[r.suite])
