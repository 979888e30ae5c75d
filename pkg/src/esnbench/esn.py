"""Echo state network classifier.

A fixed random sparse reservoir with leaky tanh units; only the linear
readout is trained, by ridge regression on [input; state] rows. Feature
vectors are static, so each sample drives the reservoir from a zero state
for a fixed number of steps (`encode_steps`) and the final state is used.
A sequence mode that feeds rows as one long stream is kept for comparison.
"""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .data import FeatureTable, Scaler
from .errors import ReservoirInitError

ENCODINGS = ("static", "sequence")


class ReadoutShapeWarning(UserWarning):
    """Training rows vs readout width on the risky side of the capacity rule."""


@dataclass(frozen=True)
class EsnHyperParams:
    n_reservoir: int = 100
    spectral_radius: float = 0.9
    leaking_rate: float = 0.5
    ridge: float = 1e-4
    input_scaling: float = 1.0
    sparsity: float = 0.1
    encode_steps: int = 20
    include_bias: bool = False
    encoding: str = "static"
    washout: int = 10           # sequence mode only

    def __post_init__(self):
        if self.n_reservoir < 1:
            raise ValueError("n_reservoir must be >= 1")
        if self.spectral_radius <= 0:
            raise ValueError("spectral_radius must be > 0")
        if not 0.0 < self.leaking_rate <= 1.0:
            raise ValueError("leaking_rate must lie in (0, 1]")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if self.input_scaling <= 0:
            raise ValueError("input_scaling must be > 0")
        if not 0.0 < self.sparsity <= 1.0:
            raise ValueError("sparsity must lie in (0, 1]")
        if self.encode_steps < 1:
            raise ValueError("encode_steps must be >= 1")
        if self.encoding not in ENCODINGS:
            raise ValueError(f"encoding must be one of {ENCODINGS}")
        if self.washout < 0:
            raise ValueError("washout must be >= 0")


@dataclass(frozen=True)
class Reservoir:
    """Fixed random weights; never trained after construction."""

    w_in: np.ndarray    # (n_reservoir, n_inputs)
    w: np.ndarray       # (n_reservoir, n_reservoir)
    hyper: EsnHyperParams
    seed: int

    @property
    def n_inputs(self) -> int:
        return self.w_in.shape[1]


@dataclass(frozen=True)
class StateMatrix:
    """Rows of [bias?; input; final reservoir state], one per sample."""

    x: np.ndarray       # (n_samples, n_columns)
    n_inputs: int
    include_bias: bool

    @property
    def n_columns(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class EsnModel:
    reservoir: Reservoir
    w_out: np.ndarray   # (n_columns,)
    threshold: float = 0.5
    # Optional end-to-end context attached by the benchmark pipeline.
    scaler: Scaler | None = None
    feature_indices: tuple[int, ...] | None = None


def spectral_radius(m: np.ndarray, tol: float = 1e-10,
                    max_iter: int = 10_000) -> float:
    """Largest eigenvalue magnitude.

    Power iteration from the normalized all-ones vector; an iteration counts
    as converged when the norm estimate is stable to `tol` and the Rayleigh
    residual confirms a real dominant eigenpair. Stalls (complex dominant
    pairs, tight eigenvalue clusters) fall back to a dense eigensolve; the
    stall threshold is max(100, n) iterations since the dense solve is
    cheaper than continuing beyond that at these sizes.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    n = m.shape[0]
    if n == 0:
        return 0.0

    def dense() -> float:
        return float(np.abs(np.linalg.eigvals(m)).max())

    v = np.ones(n) / np.sqrt(n)
    estimate = -1.0
    stall_after = min(max_iter, max(100, n))
    for _ in range(stall_after):
        w = m @ v
        norm = float(np.linalg.norm(w))
        if norm < 1e-300:
            return dense()      # start vector fell into the kernel
        v_next = w / norm
        if abs(norm - estimate) <= tol * max(1.0, norm):
            rayleigh = float(v_next @ (m @ v_next))
            residual = float(np.linalg.norm(m @ v_next - rayleigh * v_next))
            if (residual <= 1e-8 * max(1.0, abs(rayleigh))
                    and abs(abs(rayleigh) - norm) <= 1e-8 * max(1.0, norm)):
                return abs(rayleigh)
        estimate = norm
        v = v_next
    return dense()


def init_reservoir(hyper: EsnHyperParams, n_inputs: int, seed: int) -> Reservoir:
    """Draw the fixed input and recurrent weights, deterministic per seed.

    Draw order: w_in entries, then recurrent entries, then the sparsity mask.
    The recurrent matrix is rescaled so its spectral radius matches
    `hyper.spectral_radius`.
    """
    if n_inputs < 1:
        raise ValueError("n_inputs must be >= 1")
    rng = np.random.default_rng(seed)
    s = hyper.input_scaling
    w_in = rng.uniform(-s, s, size=(hyper.n_reservoir, n_inputs))
    w = rng.uniform(-1.0, 1.0, size=(hyper.n_reservoir, hyper.n_reservoir))
    if hyper.sparsity < 1.0:
        keep = rng.random(size=w.shape) < hyper.sparsity
        w = np.where(keep, w, 0.0)
    rho = spectral_radius(w)
    if rho < 1e-12:
        raise ReservoirInitError(
            f"drawn recurrent matrix has spectral radius {rho:.2e}; "
            "try another seed or a higher sparsity"
        )
    w = w * (hyper.spectral_radius / rho)
    return Reservoir(w_in=w_in, w=w, hyper=hyper, seed=seed)


def _leaky_steps(res: Reservoir, drive: np.ndarray, x0: np.ndarray,
                 steps: int) -> np.ndarray:
    """Iterate x <- (1-a) x + a tanh(drive + W x) for a batch of rows."""
    a = res.hyper.leaking_rate
    x = x0
    for _ in range(steps):
        x = (1.0 - a) * x + a * np.tanh(drive + x @ res.w.T)
    return x


def encode_sample(res: Reservoir, u: np.ndarray, initial_state=None,
                  steps: int | None = None) -> np.ndarray:
    """Final reservoir state after holding `u` constant for `encode_steps`.

    Starts from the zero state; `initial_state` and `steps` exist as test
    hooks for the contraction property.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (res.n_inputs,):
        raise ValueError(f"expected input of length {res.n_inputs}, got {u.shape}")
    if not np.isfinite(u).all():
        raise ValueError("input has non-finite entries")
    n_steps = res.hyper.encode_steps if steps is None else steps
    x0 = np.zeros(res.hyper.n_reservoir) if initial_state is None \
        else np.asarray(initial_state, dtype=np.float64)
    drive = res.w_in @ u
    return _leaky_steps(res, drive, x0, n_steps)


def _encode_rows(res: Reservoir, samples: np.ndarray) -> np.ndarray:
    """Per-sample states for all rows at once; rows are independent."""
    drive = samples @ res.w_in.T
    x0 = np.zeros((samples.shape[0], res.hyper.n_reservoir))
    return _leaky_steps(res, drive, x0, res.hyper.encode_steps)


def _encode_stream(res: Reservoir, samples: np.ndarray) -> np.ndarray:
    """Sequence mode: rows fed in order, state carried across rows."""
    a = res.hyper.leaking_rate
    states = np.empty((samples.shape[0], res.hyper.n_reservoir))
    x = np.zeros(res.hyper.n_reservoir)
    for i, u in enumerate(samples):
        x = (1.0 - a) * x + a * np.tanh(res.w_in @ u + res.w @ x)
        states[i] = x
    return states


def build_state_matrix(res: Reservoir, samples: np.ndarray) -> StateMatrix:
    """Concatenate [input; encoded state] per row, with an optional bias 1.

    Static encoding resets the state per sample, so rows are independent and
    row permutations commute with encoding.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != res.n_inputs:
        raise ValueError(
            f"expected samples with {res.n_inputs} columns, got {samples.shape}"
        )
    if not np.isfinite(samples).all():
        raise ValueError("samples contain non-finite entries")
    if res.hyper.encoding == "static":
        states = _encode_rows(res, samples)
    else:
        states = _encode_stream(res, samples)
    parts = [samples, states]
    if res.hyper.include_bias:
        parts.insert(0, np.ones((samples.shape[0], 1)))
    return StateMatrix(
        x=np.hstack(parts),
        n_inputs=res.n_inputs,
        include_bias=res.hyper.include_bias,
    )


def train_readout(x, y_target: np.ndarray, ridge: float) -> np.ndarray:
    """Ridge solution of the readout: (X'X + bI) w = X'y.

    Solved with a Cholesky factorization of the normal equations, never an
    explicit inverse. ridge == 0 requires X of full column rank.
    """
    arr = x.x if isinstance(x, StateMatrix) else np.asarray(x, dtype=np.float64)
    y = np.asarray(y_target, dtype=np.float64)
    if arr.ndim != 2 or y.shape != (arr.shape[0],):
        raise ValueError("state matrix and targets disagree on row count")
    if arr.shape[0] < 1:
        raise ValueError("need at least one training row")
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    gram = arr.T @ arr
    gram[np.diag_indices_from(gram)] += ridge
    rhs = arr.T @ y
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError(
            "normal equations are singular; use a ridge coefficient > 0"
        ) from None
    except scipy.linalg.LinAlgError:  # scipy raises its own subclass
        raise np.linalg.LinAlgError(
            "normal equations are singular; use a ridge coefficient > 0"
        ) from None
    return scipy.linalg.cho_solve(factor, rhs)


def fit(train: FeatureTable, hyper: EsnHyperParams, seed: int) -> EsnModel:
    """Reservoir init, state-matrix build, and ridge readout on {0,1} targets."""
    if len(set(train.labels.tolist())) < 2:
        raise ValueError("training table must contain both classes")
    res = init_reservoir(hyper, train.n_features, seed)
    x = build_state_matrix(res, train.values)
    y = train.labels.astype(np.float64)
    if hyper.encoding == "sequence":
        if hyper.washout >= x.x.shape[0]:
            raise ValueError("washout leaves no training rows")
        x = StateMatrix(x.x[hyper.washout:], x.n_inputs, x.include_bias)
        y = y[hyper.washout:]
    if x.x.shape[0] < x.n_columns:
        warnings.warn(
            f"{x.x.shape[0]} training rows for {x.n_columns} readout columns: "
            "the readout is underdetermined and leans on the ridge term",
            ReadoutShapeWarning,
            stacklevel=2,
        )
    w_out = train_readout(x, y, hyper.ridge)
    return EsnModel(reservoir=res, w_out=w_out)


def decision_values(model: EsnModel, samples: np.ndarray) -> np.ndarray:
    """Raw readout outputs before thresholding."""
    x = build_state_matrix(model.reservoir, np.asarray(samples, dtype=np.float64))
    return x.x @ model.w_out


def predict(model: EsnModel, samples: np.ndarray) -> np.ndarray:
    """Labels in {0,1}; a raw output exactly on the threshold maps to 1."""
    raw = decision_values(model, samples)
    return (raw >= model.threshold).astype(np.int64)


def with_context(model: EsnModel, scaler: Scaler,
                 feature_indices) -> EsnModel:
    """Attach the scaling/selection context used upstream of this model."""
    return replace(model, scaler=scaler,
                   feature_indices=tuple(int(i) for i in feature_indices))


def save_model(model: EsnModel, path) -> None:
    """Flat npz dump of weights plus a JSON header; an audit format, not a
    stability-guaranteed one."""
    header = {
        "hyper": {
            k: getattr(model.reservoir.hyper, k)
            for k in EsnHyperParams.__dataclass_fields__
        },
        "seed": model.reservoir.seed,
        "threshold": model.threshold,
    }
    buf = io.BytesIO()
    np.savez(
        buf,
        header=np.frombuffer(json.dumps(header, sort_keys=True).encode(), dtype=np.uint8),
        w_in=model.reservoir.w_in,
        w=model.reservoir.w,
        w_out=model.w_out,
    )
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_model(path) -> EsnModel:
    with np.load(path) as npz:
        header = json.loads(bytes(npz["header"]).decode())
        hyper = EsnHyperParams(**header["hyper"])
        res = Reservoir(w_in=npz["w_in"], w=npz["w"], hyper=hyper,
                        seed=int(header["seed"]))
        return EsnModel(reservoir=res, w_out=npz["w_out"],
                        threshold=float(header["threshold"]))
