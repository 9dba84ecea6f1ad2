"""Tree expansion of log Z with replica interpolation.

log Z =  sum_n (1/n!) sum_{labeled trees T on n vertices}
         int dw_T  int dmu_{T,w}  sum_{orientations}  prod_i  D_i S(z_i),

where z_i = -lambda (phi_i phibar_i)^{p-1}, the Gaussian replica measure
has covariance X_ij(w) = min of the w parameters along the unique tree
path i->j (X_ii = 1), and each edge, once oriented, contributes one
phibar-derivative at its tail and one phi-derivative at its head.  Both
orientations of every edge are summed: differentiating the symmetric
replica covariance produces exactly that pair, and the order-lambda^2
coefficient of log Z confirms it.

The n = 1 term has no derivatives and reduces to the radial quadrature
int e^{-t} S(-lambda t^{p-1}) dt, evaluated deterministically.  For
n >= 2 the w integral uses a tensor Gauss-Legendre rule (3 axes or
fewer) so the reported standard error is purely from field sampling;
beyond that, w is sampled jointly with the fields.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import jets, oracle
from .errors import ContractError, DomainError, NumericalError, SizeError
from .kernel import CUT_PAD, ModelSpec, RayEvaluator, radius
from .quadrature import adaptive_quadrature

__all__ = [
    "LabeledTree", "OrientedTree", "ReplicaCovariance", "MCEstimate",
    "LveConfig", "enumerate_trees", "orient_tree", "covariance",
    "sample_replicas", "tree_integrand", "tree_term", "log_z_partial",
    "order_one_ibp_check",
]

#: enumerating all labeled trees beyond this many vertices is off the desk
MAX_TREE_VERTICES = 8
#: eigenvalues of a replica covariance may round below zero by at most this
PSD_TOL = 1e-10
#: samples are redrawn when z_i comes closer than this to the cut
CUT_CLEARANCE = 1e-12
#: Gauss-Legendre order per w axis under the tensor rule
W_QUAD_ORDER = 8
#: tensor w rule is used up to this many vertices (3 w axes)
TENSOR_RULE_MAX_N = 4


class LabeledTree(NamedTuple):
    """Undirected labeled tree; vertices are 0..n-1, edges sorted pairs."""

    n: int
    edges: tuple


@dataclass(frozen=True)
class OrientedTree:
    """A labeled tree with one direction per edge.

    The tail of an edge carries the phibar-derivative, the head the
    phi-derivative, so vertex i accumulates (in_degree[i], out_degree[i])
    derivatives of type (phi, phibar).
    """

    n: int
    edges: tuple  # (tail, head) pairs
    in_degree: tuple
    out_degree: tuple


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo value with its standard error."""

    value: complex
    std_error: float
    samples: int
    seed: int


@dataclass(frozen=True)
class LveConfig:
    """Execution parameters of the tree-expansion engine.

    w_rule: "tensor" forces tensor quadrature in w (only valid for
    n <= 4), "joint" samples w with the fields, "auto" picks tensor
    for n <= 4 and joint beyond.
    """

    mc_samples: int = 200_000
    w_rule: str = "auto"
    master_seed: int = 0
    n_max: int = 4
    quad_tol: float = 1e-10

    def __post_init__(self):
        if self.mc_samples < 100:
            raise ContractError("mc_samples must be >= 100")
        if self.n_max < 1:
            raise ContractError("n_max must be >= 1")
        if self.w_rule not in ("auto", "tensor", "joint"):
            raise ContractError("w_rule must be 'auto', 'tensor' or 'joint'")


# ---------------------------------------------------------------------------
# trees, orientations, covariances
# ---------------------------------------------------------------------------

def enumerate_trees(n: int) -> list:
    """All n^{n-2} labeled trees on vertices 0..n-1, by Prufer decoding.

    n = 1 yields the single empty tree.
    """
    if n < 1:
        raise ContractError("n must be >= 1")
    if n > MAX_TREE_VERTICES:
        raise SizeError(
            f"enumerating labeled trees is capped at n = {MAX_TREE_VERTICES} "
            f"({MAX_TREE_VERTICES}^{MAX_TREE_VERTICES - 2} trees)")
    if n == 1:
        return [LabeledTree(1, ())]
    if n == 2:
        return [LabeledTree(2, ((0, 1),))]
    trees = []
    for seq in itertools.product(range(n), repeat=n - 2):
        trees.append(LabeledTree(n, _prufer_decode(n, seq)))
    return trees


def _prufer_decode(n: int, seq) -> tuple:
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    ptr = 0
    leaf = -1
    # standard linear-time decoding: repeatedly attach the smallest leaf
    for v in seq:
        if leaf < 0:
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            leaf = -1
    last = [v for v in range(n) if degree[v] == 1]
    edges.append((last[0], last[1]))
    return tuple(edges)


def orient_tree(tree: LabeledTree, orientation_index: int) -> OrientedTree:
    """Orient each edge by one bit of ``orientation_index``.

    Bit e = 0 keeps edge e as stored (tail, head); bit e = 1 reverses it.
    """
    n, edges = tree.n, tree.edges
    if not 0 <= orientation_index < 2 ** len(edges):
        raise ContractError(
            f"orientation index {orientation_index} out of range for "
            f"{len(edges)} edges")
    oriented = []
    in_deg = [0] * n
    out_deg = [0] * n
    for e, (u, v) in enumerate(edges):
        tail, head = ((u, v) if not (orientation_index >> e) & 1 else (v, u))
        oriented.append((tail, head))
        out_deg[tail] += 1
        in_deg[head] += 1
    return OrientedTree(n, tuple(oriented), tuple(in_deg), tuple(out_deg))


@dataclass(frozen=True)
class ReplicaCovariance:
    """Symmetric replica covariance with unit diagonal, PSD by construction."""

    x: np.ndarray

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.x)[0])

    def factor(self) -> np.ndarray:
        """A with A A^T = x; tiny negative eigenvalues are clipped to 0."""
        vals, vecs = np.linalg.eigh(self.x)
        if vals[0] < -PSD_TOL:
            raise NumericalError(
                f"replica covariance has eigenvalue {vals[0]:.3e} < -{PSD_TOL}")
        return vecs * np.sqrt(np.clip(vals, 0.0, None))


def _path_edge_table(tree: LabeledTree) -> list:
    """For each ordered pair (i, j), i < j, the edge indices on the path."""
    n, edges = tree.n, tree.edges
    adj = [[] for _ in range(n)]
    for idx, (u, v) in enumerate(edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    table = []
    for i in range(n):
        parent = {i: (None, None)}
        stack = [i]
        while stack:
            u = stack.pop()
            for v, idx in adj[u]:
                if v not in parent:
                    parent[v] = (u, idx)
                    stack.append(v)
        for j in range(i + 1, n):
            path = []
            v = j
            while v != i:
                u, idx = parent[v]
                path.append(idx)
                v = u
            table.append((i, j, tuple(path)))
    return table


def covariance(tree: LabeledTree, w) -> ReplicaCovariance:
    """X_ij = min of w over the tree path i -> j; X_ii = 1."""
    w = np.asarray(w, dtype=float)
    if w.shape != (len(tree.edges),):
        raise ContractError(
            f"need one w per edge ({len(tree.edges)}), got shape {w.shape}")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ContractError("w parameters must lie in [0, 1]")
    x = np.eye(tree.n)
    for i, j, path in _path_edge_table(tree):
        x[i, j] = x[j, i] = w[list(path)].min() if path else 1.0
    return ReplicaCovariance(x)


def sample_replicas(cov: ReplicaCovariance, rng: np.random.Generator,
                    size: int | None = None) -> np.ndarray:
    """Complex Gaussian replicas with E[phi_i conj(phi_j)] = X_ij.

    Returns shape (n,) for size None, else (n, size); phibar_i is the
    complex conjugate of phi_i by construction.
    """
    a = cov.factor()
    n = a.shape[0]
    shape = (n,) if size is None else (n, size)
    zeta = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        / math.sqrt(2.0)
    return a @ zeta


# ---------------------------------------------------------------------------
# integrand
# ---------------------------------------------------------------------------

def tree_integrand(spec: ModelSpec, ot: OrientedTree, fields) -> complex:
    """prod_i  d^{a_i}/dphi^{a_i} d^{b_i}/dphibar^{b_i} S(z_i) for one
    orientation, with a_i = in_degree, b_i = out_degree."""
    fields = np.asarray(fields, dtype=complex)
    if fields.shape != (ot.n,):
        raise ContractError(f"need {ot.n} replica fields, got {fields.shape}")
    value = 1.0 + 0j
    for i in range(ot.n):
        value *= jets.corner_derivative(spec, fields[i], fields[i].conjugate(),
                                        ot.in_degree[i], ot.out_degree[i])
    return value


def _cut_distance(z: np.ndarray, rp: float) -> np.ndarray:
    dist = np.abs(z - rp)
    beyond = z.real >= rp
    dist[beyond] = np.abs(z.imag[beyond])
    return dist


class _VertexDerivatives:
    """Vectorized corner-derivative tables along the sampling ray.

    All z_i = -lambda t^{p-1}, t >= 0, lie on one ray from the origin, so
    a single branch-continued evaluator serves every vertex and sample.
    """

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        direction = -spec.lam / abs(spec.lam)
        self.ray = RayEvaluator(spec.p, direction)
        self.direction = direction
        self.rp = radius(spec.p)

    def z_of(self, phi: np.ndarray) -> np.ndarray:
        t = (phi * phi.conjugate()).real
        rho = abs(self.spec.lam) * t ** (self.spec.p - 1)
        return rho * self.direction

    def tables(self, phi: np.ndarray, degrees) -> list:
        """D[v][a] = mixed partial of total order d_v, split (a, d_v - a),
        evaluated at every sample; phi has shape (n, B)."""
        p, lam = self.spec.p, self.spec.lam
        out = []
        for v, d in enumerate(degrees):
            pv = phi[v]
            t = (pv * pv.conjugate()).real
            rho = abs(lam) * t ** (p - 1)
            z = rho * self.direction
            _, _, _, e = self.ray.kernel_arrays(rho)
            coeffs = jets.e_jet_coeffs(p, z, e, d - 1)
            s_vals = jets.s_derivative_values(p, z, coeffs, d)
            out.append(jets.mixed_partials_antidiagonal(
                p, lam, pv, pv.conjugate(), s_vals, d))
        return out


def _orientation_table(tree: LabeledTree) -> np.ndarray:
    """in-degree vectors, one row per orientation index."""
    n_orient = 2 ** len(tree.edges)
    table = np.zeros((n_orient, tree.n), dtype=np.int64)
    for o in range(n_orient):
        table[o] = orient_tree(tree, o).in_degree
    return table


def _orientation_sum(tables: list, orient_in: np.ndarray) -> np.ndarray:
    """sum over orientations of prod_v D[v][in_v], per sample."""
    total = 0.0
    for in_deg in orient_in:
        prod = tables[0][in_deg[0]]
        for v in range(1, len(tables)):
            prod = prod * tables[v][in_deg[v]]
        total = total + prod
    return total


# ---------------------------------------------------------------------------
# per-tree estimates
# ---------------------------------------------------------------------------

def _empty_tree_term(spec: ModelSpec, config: LveConfig) -> MCEstimate:
    """n = 1: int dmu S(z) reduces to a deterministic radial quadrature."""
    if spec.lam == 0:
        return MCEstimate(0.0 + 0j, 0.0, 0, config.master_seed)
    alpha = oracle.rotation_angle(spec)
    direction = -spec.lam * cmath.exp(1j * (spec.p - 1) * alpha)
    direction /= abs(direction)
    ray = RayEvaluator(spec.p, direction)
    scale = abs(spec.lam)

    def integrand(t: np.ndarray) -> np.ndarray:
        rho = scale * np.abs(t) ** (spec.p - 1)
        _, _, s, _ = ray.kernel_arrays(rho)
        return np.exp(-t) * s

    result = oracle.radial_integral(integrand, alpha, config.quad_tol)
    return MCEstimate(result.value, 0.0, 0, config.master_seed)


def _draw_fields(factor: np.ndarray, rng: np.random.Generator, count: int,
                 vderiv: _VertexDerivatives, redraw_stats: list) -> np.ndarray:
    """Fields with the given covariance factor, redrawing any sample whose
    z_i falls within CUT_CLEARANCE of the cut (probability ~ 0)."""
    n = factor.shape[0]
    zeta = (rng.standard_normal((n, count)) + 1j * rng.standard_normal((n, count))) \
        / math.sqrt(2.0)
    phi = factor @ zeta
    while True:
        dist = _cut_distance(vderiv.z_of(phi), vderiv.rp)
        bad = np.unique(np.nonzero(dist < CUT_CLEARANCE)[1])
        if bad.size == 0:
            return phi
        redraw_stats[0] += int(bad.size)
        zeta = (rng.standard_normal((n, bad.size))
                + 1j * rng.standard_normal((n, bad.size))) / math.sqrt(2.0)
        phi[:, bad] = factor @ zeta


def _combine_node_estimates(weights, means, variances) -> tuple:
    value = 0.0 + 0j
    var = 0.0
    for wgt, mean, v in zip(weights, means, variances):
        value += wgt * mean
        var += wgt * wgt * v
    return value, math.sqrt(var)


def _block_stats(values: np.ndarray) -> tuple:
    """(mean, variance of the mean) for a complex sample block."""
    count = values.size
    mean = complex(values.mean())
    if count < 2:
        return mean, 0.0
    var = (values.real.var(ddof=1) + values.imag.var(ddof=1)) / count
    return mean, float(var)


def _use_tensor_rule(n: int, config: LveConfig) -> bool:
    if config.w_rule == "tensor":
        if n > TENSOR_RULE_MAX_N:
            raise ContractError(
                f"tensor w rule supports n <= {TENSOR_RULE_MAX_N}")
        return True
    return config.w_rule == "auto" and n <= TENSOR_RULE_MAX_N


def tree_term(spec: ModelSpec, tree: LabeledTree, config: LveConfig,
              tree_index: int = 0) -> MCEstimate:
    """The (w, fields) integral of the orientation-summed integrand for one
    tree; ``tree_index`` keys the random stream so that results do not
    depend on evaluation order."""
    n = tree.n
    if n == 1:
        return _empty_tree_term(spec, config)
    if spec.lam == 0:
        return MCEstimate(0.0 + 0j, 0.0, config.mc_samples, config.master_seed)

    vderiv = _VertexDerivatives(spec)
    degrees = [0] * n
    for u, v in tree.edges:
        degrees[u] += 1
        degrees[v] += 1
    orient_in = _orientation_table(tree)
    redraw_stats = [0]

    if _use_tensor_rule(n, config):
        nodes_1d, weights_1d = np.polynomial.legendre.leggauss(W_QUAD_ORDER)
        nodes_1d = 0.5 * (nodes_1d + 1.0)
        weights_1d = 0.5 * weights_1d
        axes = len(tree.edges)
        w_nodes = list(itertools.product(*([range(W_QUAD_ORDER)] * axes)))
        n_nodes = len(w_nodes)
        if config.mc_samples < 4 * n_nodes:
            raise ContractError(
                f"tensor w rule at n={n} has {n_nodes} quadrature nodes; "
                f"need mc_samples >= {4 * n_nodes}")
        base, rem = divmod(config.mc_samples, n_nodes)
        weights, means, variances = [], [], []
        for node_index, combo in enumerate(w_nodes):
            w = nodes_1d[list(combo)]
            wgt = float(np.prod(weights_1d[list(combo)]))
            count = base + (1 if node_index < rem else 0)
            factor = covariance(tree, w).factor()
            rng = np.random.default_rng(np.random.SeedSequence(
                config.master_seed, spawn_key=(n, tree_index, node_index)))
            phi = _draw_fields(factor, rng, count, vderiv, redraw_stats)
            tables = vderiv.tables(phi, degrees)
            mean, var = _block_stats(_orientation_sum(tables, orient_in))
            weights.append(wgt)
            means.append(mean)
            variances.append(var)
        value, std = _combine_node_estimates(weights, means, variances)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(
            config.master_seed, spawn_key=(n, tree_index, 0)))
        path_table = _path_edge_table(tree)
        block = 16384
        remaining = config.mc_samples
        sums = 0.0 + 0j
        sq_re = 0.0
        sq_im = 0.0
        while remaining > 0:
            count = min(block, remaining)
            remaining -= count
            w = rng.uniform(size=(len(tree.edges), count))
            x = np.broadcast_to(np.eye(n), (count, n, n)).copy()
            for i, j, path in path_table:
                path_min = w[list(path)].min(axis=0)
                x[:, i, j] = path_min
                x[:, j, i] = path_min
            vals, vecs = np.linalg.eigh(x)
            if float(vals.min()) < -PSD_TOL:
                raise NumericalError(
                    f"replica covariance eigenvalue {vals.min():.3e} < -{PSD_TOL}")
            factors = vecs * np.sqrt(np.clip(vals, 0.0, None))[:, None, :]
            zeta = (rng.standard_normal((n, count))
                    + 1j * rng.standard_normal((n, count))) / math.sqrt(2.0)
            phi = np.einsum("bij,jb->ib", factors, zeta)
            dist = _cut_distance(vderiv.z_of(phi), vderiv.rp)
            bad = np.unique(np.nonzero(dist < CUT_CLEARANCE)[1])
            while bad.size:
                redraw_stats[0] += int(bad.size)
                zeta = (rng.standard_normal((n, bad.size))
                        + 1j * rng.standard_normal((n, bad.size))) / math.sqrt(2.0)
                phi[:, bad] = np.einsum("bij,jb->ib", factors[bad], zeta)
                dist = _cut_distance(vderiv.z_of(phi[:, bad]), vderiv.rp)
                bad = bad[np.unique(np.nonzero(dist < CUT_CLEARANCE)[1])]
            tables = vderiv.tables(phi, degrees)
            values = _orientation_sum(tables, orient_in)
            sums += complex(values.sum())
            sq_re += float((values.real ** 2).sum())
            sq_im += float((values.imag ** 2).sum())
        total = config.mc_samples
        mean = sums / total
        var_re = (sq_re - total * mean.real ** 2) / (total - 1)
        var_im = (sq_im - total * mean.imag ** 2) / (total - 1)
        value = mean
        std = math.sqrt(max(var_re + var_im, 0.0) / total)

    if redraw_stats[0] > max(1, 1e-4 * config.mc_samples):
        raise NumericalError(
            f"{redraw_stats[0]} of {config.mc_samples} samples fell within "
            f"{CUT_CLEARANCE} of the cut; the estimator would be biased")
    return MCEstimate(value, std, config.mc_samples, config.master_seed)


def log_z_partial(spec: ModelSpec, config: LveConfig) -> tuple:
    """Per-order and cumulative estimates of the tree expansion of log Z.

    Returns (per_order, cumulative): per_order[k] is the order n = k+1
    estimate (1/n!) sum_trees tree_term, cumulative combines them with
    errors added in quadrature.
    """
    if config.n_max > 6:
        raise SizeError("n_max is capped at 6 (desk scale)")
    per_order = []
    for n in range(1, config.n_max + 1):
        inv_fact = 1.0 / math.factorial(n)
        total = 0.0 + 0j
        var = 0.0
        samples = 0
        for tree_index, tree in enumerate(enumerate_trees(n)):
            est = tree_term(spec, tree, config, tree_index)
            total += est.value
            var += est.std_error ** 2
            samples += est.samples
        per_order.append(MCEstimate(inv_fact * total,
                                    inv_fact * math.sqrt(var),
                                    samples, config.master_seed))
    cumulative = MCEstimate(
        sum(est.value for est in per_order),
        math.sqrt(math.fsum(est.std_error ** 2 for est in per_order)),
        sum(est.samples for est in per_order),
        config.master_seed)
    return per_order, cumulative


def order_one_ibp_check(spec: ModelSpec, tol: float = 1e-10) -> complex:
    """The n = 1 term through the identity S(z) = int_0^1 z S'(tz) dt.

    Evaluates int_0^1 dt of the radial reduction of z S'(t z) under the
    Gaussian measure; must agree with the direct n = 1 quadrature.
    """
    if spec.lam == 0:
        return 0.0 + 0j
    alpha = oracle.rotation_angle(spec)
    direction = -spec.lam * cmath.exp(1j * (spec.p - 1) * alpha)
    direction /= abs(direction)
    ray = RayEvaluator(spec.p, direction)
    scale = abs(spec.lam)
    p = spec.p

    def inner(t_param: float) -> complex:
        def integrand(t: np.ndarray) -> np.ndarray:
            rho = scale * np.abs(t) ** (p - 1)
            z = rho * direction
            rho_scaled = t_param * rho
            _, _, _, e = ray.kernel_arrays(rho_scaled)
            zs = rho_scaled * direction
            s_prime = p * e * (1.0 + (p - 1) * zs * e)
            return np.exp(-t) * z * s_prime

        return oracle.radial_integral(integrand, alpha, tol / 10.0).value

    def outer(ts: np.ndarray) -> np.ndarray:
        return np.array([inner(float(t)) for t in ts])

    value, _, _ = adaptive_quadrature(outer, 0.0, 1.0, tol, initial_panels=4)
    return value
