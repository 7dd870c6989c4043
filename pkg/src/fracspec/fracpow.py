"""Fractional powers of m-accretive matrices by independent routes.

Routes implemented:

1. Balakrishnan integral  A^a = (sin a pi / pi) int_0^inf l^(a-1) (l+A)^(-1) A dl,
   split at ``split`` with substitutions that remove both the endpoint
   singularity and the infinite tail, plus an analytic Neumann-series tail
   beyond ``outer_cap``.
2. Spectral calculus for Hermitian positive matrices (numcore.herm_power).
3. Grunwald-type series for the Poisson-difference generator.
4. Closed-form singular-integral matrices (Marchaud derivative for the shift
   generator, |s|^(1-2a) kernel on f'' for the Gauss generator).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded, toeplitz
from scipy.special import gamma, gammaln, roots_jacobi

from .config import DEFAULT, Tolerances
from .discretize import GridFunction, OperatorMatrix, axis_kernel_both, marchaud_right_derivative, riesz_constant, second_derivative
from .errors import BadAlpha, IncommensurateShift, NotAccretive, QuadratureNotConverged
from .numcore import InnerProduct, asmatrix, hermitian_part
from .semigroup import generator_matrix


@dataclass(frozen=True)
class BalakrishnanConfig:
    alpha: float
    split: float = 1.0
    nodes_inner: int = 200
    nodes_outer: int = 200
    outer_cap: float = 1e6

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise BadAlpha(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.nodes_inner < 16 or self.nodes_outer < 16:
            raise ValueError("need at least 16 quadrature nodes per piece")
        if not 0.0 < self.split < self.outer_cap:
            raise ValueError("need 0 < split < outer_cap")

    def doubled(self):
        return BalakrishnanConfig(self.alpha, self.split, 2 * self.nodes_inner,
                                  2 * self.nodes_outer, self.outer_cap)


class _ResolventSolver:
    """Solves (l I + A) X = B, exploiting small bandwidth when present."""

    def __init__(self, A):
        self.A = np.asarray(A, dtype=complex)
        n = self.A.shape[0]
        r, c = np.nonzero(self.A)
        self.lo = int(np.max(r - c, initial=0))
        self.up = int(np.max(c - r, initial=0))
        self.banded = n > 64 and (self.lo + self.up + 1) <= 8

    def solve(self, lam, B):
        M = self.A.copy()
        M[np.diag_indices_from(M)] += lam
        if not self.banded:
            return np.linalg.solve(M, B)
        lo, up = self.lo, self.up
        n = M.shape[0]
        ab = np.zeros((lo + up + 1, n), dtype=complex)
        for d in range(-lo, up + 1):
            diag = np.diagonal(M, d)
            if d >= 0:
                ab[up - d, d:] = diag
            else:
                ab[up - d, : n + d] = diag
        return solve_banded((lo, up), ab, B)


def _gauss_nodes(a, b, m):
    x, w = np.polynomial.legendre.leggauss(m)
    return (b - a) / 2 * (x + 1) + a, (b - a) / 2 * w


def _balak_positive(A, B, cfg):
    """(sin a pi / pi) int_0^inf l^(a-1) (l+A)^(-1) (A @ B-part) dl applied to B.

    B is the raw right-hand side; the integrand uses A @ B.
    """
    a = cfg.alpha
    solver = _ResolventSolver(A)
    AB = A @ B
    acc = np.zeros_like(AB)
    # inner piece (0, split): l = u^(1/a) flattens the l^(a-1) singularity
    u, w = _gauss_nodes(0.0, cfg.split**a, cfg.nodes_inner)
    for ui, wi in zip(u, w):
        acc += (wi / a) * solver.solve(ui ** (1.0 / a), AB)
    # outer piece (split, cap): l = split * v^(-1/(1-a))
    v_cap = (cfg.split / cfg.outer_cap) ** (1.0 - a)
    v, w = _gauss_nodes(v_cap, 1.0, cfg.nodes_outer)
    s_fac = cfg.split**a / (1.0 - a)
    for vi, wi in zip(v, w):
        lam = cfg.split * vi ** (-1.0 / (1.0 - a))
        acc += (wi * s_fac * vi ** (-1.0 / (1.0 - a))) * solver.solve(lam, AB)
    # analytic tail beyond cap from the Neumann series of (l+A)^(-1) A
    term = B.copy()
    for j in range(1, 5):
        term = A @ term
        acc += (-1.0) ** (j + 1) * cfg.outer_cap ** (a - j) / (j - a) * term
    return np.sin(a * np.pi) / np.pi * acc


def _balak_negative(A, B, cfg):
    """(sin a pi / pi) int_0^inf l^(-a) (l+A)^(-1) B dl."""
    a = cfg.alpha
    solver = _ResolventSolver(A)
    acc = np.zeros_like(np.asarray(B, dtype=complex))
    # inner piece: l = u^(1/(1-a)) flattens l^(-a)
    u, w = _gauss_nodes(0.0, cfg.split ** (1.0 - a), cfg.nodes_inner)
    for ui, wi in zip(u, w):
        acc += (wi / (1.0 - a)) * solver.solve(ui ** (1.0 / (1.0 - a)), B)
    # outer piece: l = split * v^(-1/a)
    v_cap = (cfg.split / cfg.outer_cap) ** a
    v, w = _gauss_nodes(v_cap, 1.0, cfg.nodes_outer)
    s_fac = cfg.split ** (1.0 - a) / a
    for vi, wi in zip(v, w):
        lam = cfg.split * vi ** (-1.0 / a)
        acc += (wi * s_fac * vi ** (-1.0 / a)) * solver.solve(lam, B)
    # analytic tail
    term = np.asarray(B, dtype=complex).copy()
    for j in range(1, 5):
        acc += (-1.0) ** (j + 1) * cfg.outer_cap ** (1.0 - a - j) / (a + j - 1.0) * term
        term = A @ term
    return np.sin(a * np.pi) / np.pi * acc


def _check_accretive(A, ip, tol):
    Am = asmatrix(A)
    w = np.linalg.eigvalsh(ip.whiten(hermitian_part(Am, ip)))
    if w[0] < -tol.accretive_floor_rel * np.linalg.norm(Am):
        raise NotAccretive(f"Hermitian part has eigenvalue {w[0]:.3e}")


def _resolve_ip(A, ip):
    if ip is not None:
        return ip
    got = getattr(A, "ip", None)
    return got if got is not None else InnerProduct.uniform(asmatrix(A).shape[0])


def _wrap_like(A, m):
    if isinstance(A, OperatorMatrix):
        return OperatorMatrix(m, A.grid, A.ip)
    return m


def _with_doubling(kernel, A, B, cfg, check, tol):
    out = kernel(A, B, cfg)
    if not check:
        return out
    fine = kernel(A, B, cfg.doubled())
    scale = np.linalg.norm(fine)
    if scale > 0 and np.linalg.norm(fine - out) / scale > tol.quad_doubling_rel:
        raise QuadratureNotConverged(
            f"node doubling moved the result by {np.linalg.norm(fine - out) / scale:.3e}")
    return fine


def balakrishnan_power(A, cfg, ip=None, check=False, tol: Tolerances = DEFAULT):
    """A^alpha via the Balakrishnan integral; A must be m-accretive."""
    ip = _resolve_ip(A, ip)
    _check_accretive(A, ip, tol)
    Am = asmatrix(A).astype(complex)
    out = _with_doubling(_balak_positive, Am, np.eye(Am.shape[0], dtype=complex), cfg, check, tol)
    return _wrap_like(A, out)


def balakrishnan_apply(A, f, cfg, ip=None, check=False, tol: Tolerances = DEFAULT):
    """A^alpha f without forming the full power matrix."""
    ip = _resolve_ip(A, ip)
    _check_accretive(A, ip, tol)
    Am = asmatrix(A).astype(complex)
    v = f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=complex)
    out = _with_doubling(_balak_positive, Am, v, cfg, check, tol)
    if isinstance(f, GridFunction):
        return GridFunction(f.grid, out)
    return out


def negative_power(A, cfg, ip=None, check=False, tol: Tolerances = DEFAULT):
    """A^(-alpha) via the Balakrishnan integral."""
    ip = _resolve_ip(A, ip)
    _check_accretive(A, ip, tol)
    Am = asmatrix(A).astype(complex)
    out = _with_doubling(_balak_negative, Am, np.eye(Am.shape[0], dtype=complex), cfg, check, tol)
    return _wrap_like(A, out)


def lemma_constant(alpha, norm_J_inv):
    """C_(1-a) = 2 ||J^(-1)|| / (1-a) + 1/a, the negative-power norm bound."""
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha}")
    return 2.0 * norm_J_inv / (1.0 - alpha) + 1.0 / alpha


@dataclass(frozen=True)
class GLCoefficients:
    alpha: float
    lam: float
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))


def gl_coefficients(alpha, lam, K):
    """Grunwald-type coefficients C_0..C_K by the stable recurrence
    C_0 = lam^a, C_(k+1) = C_k (k - a) / (k + 1)."""
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha}")
    if lam <= 0 or K < 1:
        raise ValueError("need lam > 0 and K >= 1")
    c = np.empty(K + 1)
    c[0] = lam**alpha
    for k in range(K):
        c[k + 1] = c[k] * (k - alpha) / (k + 1)
    return GLCoefficients(alpha, lam, c)


def gl_coefficients_alt(alpha, lam, K, nodes=None, tol: Tolerances = DEFAULT):
    """C'_k = lam^(k+1) (sin a pi / pi) int_0^inf xi^(a-1) (xi+lam)^(-k-1) dxi,
    evaluated by Gauss-Jacobi quadrature after mapping onto (0, 1).

    Deliberately quadrature-based (no closed Gamma form) so the identity
    C'_(k+1) - C'_k = C_(k+1) is a genuine cross-check.
    """
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha}")

    def table(m):
        # xi = lam (1-t)/t maps the integral to lam^a int_0^1 (1-t)^(a-1) t^(k-a) dt;
        # with t = (1+y)/2 and the Gauss-Jacobi weight (1-y)^(a-1) (1+y)^(-a)
        # the remaining factor is the polynomial ((1+y)/2)^k, so the rule is
        # exact once 2m exceeds K.
        with np.errstate(invalid="ignore"):  # scipy's recurrence warms up with 0/0
            y, w = roots_jacobi(m, alpha - 1.0, -alpha)
        base = (1.0 + y) / 2.0
        pows = base[None, :] ** np.arange(K + 1)[:, None]
        return lam**alpha * np.sin(alpha * np.pi) / np.pi * (pows @ w)

    m = max(32, K // 2 + 8)
    coarse, fine = table(m), table(2 * m)
    if np.max(np.abs(fine - coarse)) > tol.quad_doubling_rel * np.max(np.abs(fine)):
        raise QuadratureNotConverged("Gauss-Jacobi node doubling moved C' beyond tolerance")
    return fine


def gl_partial_sum(alpha, lam, K):
    """S_K = sum_(k<=K) C_k = lam^a Gamma(K+1-a) / (K! Gamma(1-a)), exact."""
    return lam**alpha * np.exp(gammaln(K + 1 - alpha) - gammaln(K + 1) - gammaln(1 - alpha))


def gl_abs_sum(alpha, lam, K=100_000):
    """sum_k |C_k| summed by recurrence up to K with the telescoped remainder.

    Since C_k < 0 for k >= 1 and the full series sums to zero, the exact
    remainder past K is S_K itself, so the truncation tail is zero.
    """
    c = gl_coefficients(alpha, lam, K).c
    return float(c[0] - np.sum(c[1:]) + gl_partial_sum(alpha, lam, K))


def gl_power(spec, alpha, f, cfg=None):
    """A^alpha f for the Poisson-difference generator via the Grunwald series
    A^a f(x) = sum_k C_k f(x - k mu); exact on the grid (zero extension)."""
    if spec.kind != "poisson":
        raise ValueError("gl_power applies to the Poisson-difference semigroup")
    m = spec.shift_steps
    v = f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=complex)
    n = v.size
    kmax = (n - 1) // m
    c = gl_coefficients(alpha, spec.lam, max(kmax, 1)).c
    out = c[0] * v.astype(complex)
    for k in range(1, kmax + 1):
        out[k * m :] += c[k] * v[: n - k * m]
    if isinstance(f, GridFunction):
        return GridFunction(f.grid, out)
    return out


def gl_power_matrix(spec, alpha):
    """Matrix of the Grunwald series sum_k C_k S_m^k on the grid."""
    m = spec.shift_steps
    n = spec.grid.n
    kmax = (n - 1) // m
    c = gl_coefficients(alpha, spec.lam, max(kmax, 1)).c
    col = np.zeros(n)
    col[: kmax * m + 1 : m] = c[: kmax + 1]
    return OperatorMatrix(toeplitz(col, np.zeros(n)), spec.grid, spec.grid.ip())


def riesz_power_constant(alpha):
    """K_a = -Gamma(2a-1) cos(a pi/2) / (2^(a-1) Gamma(1-a)), for a in (1/2, 1)."""
    if not 0.5 < alpha < 1.0:
        raise BadAlpha(f"K_alpha needs alpha in (1/2, 1), got {alpha}")
    return -gamma(2 * alpha - 1) * np.cos(alpha * np.pi / 2) / (2 ** (alpha - 1) * gamma(1 - alpha))


@dataclass(frozen=True)
class PowerComparison:
    balakrishnan: np.ndarray
    closed_form: np.ndarray
    rel_l2: float
    convention: str


def _rel_l2(u, v, ip, mask=None):
    if mask is not None:
        u, v = u[mask], v[mask]
        w = ip.weights[mask]
    else:
        w = ip.weights
    denom = np.sqrt(np.sum(w * np.abs(v) ** 2))
    return float(np.sqrt(np.sum(w * np.abs(u - v) ** 2)) / denom)


def marchaud_power_check(alpha, grid, f, cfg=None):
    """Shift-generator Balakrishnan power vs the Marchaud derivative matrix."""
    from .semigroup import SemigroupSpec  # local to avoid import cycle noise

    cfg = cfg or BalakrishnanConfig(alpha)
    A = generator_matrix(SemigroupSpec("shift", grid))
    v = f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=complex)
    via_balak = balakrishnan_apply(A, v, cfg)
    via_closed = marchaud_right_derivative(grid, alpha).m @ v
    rel = _rel_l2(via_balak, via_closed, grid.ip())
    return PowerComparison(via_balak, via_closed, rel,
                           "truncated Marchaud right derivative, eps = h, analytic first cell")


def riesz_power_check(alpha, grid, f, cfg=None, interior_margin=0.1):
    """Gauss-generator Balakrishnan power vs K_a times the |s|^(1-2a) kernel
    applied to f''; valid for alpha in (3/4, 1)."""
    from .semigroup import SemigroupSpec

    if not 0.75 < alpha < 1.0:
        raise BadAlpha(f"riesz power route needs alpha in (3/4, 1), got {alpha}")
    cfg = cfg or BalakrishnanConfig(alpha)
    A = generator_matrix(SemigroupSpec("gauss", grid))
    v = f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=complex)
    via_balak = balakrishnan_apply(A, v, cfg)
    kernel = axis_kernel_both(grid, 1.0 - 2.0 * alpha)
    const = riesz_power_constant(alpha) * riesz_constant(alpha)
    via_closed = const * (kernel @ (second_derivative(grid).m @ v))
    margin = int(np.ceil(interior_margin * grid.n))
    mask = np.zeros(grid.n, dtype=bool)
    mask[margin : grid.n - margin] = True
    rel = _rel_l2(via_balak, via_closed, grid.ip(), mask)
    return PowerComparison(
        via_balak, via_closed, rel,
        "kernel |s|^(1-2a) with B_alpha normalization, applied to the second derivative")
