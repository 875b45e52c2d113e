"""Rates, level schemes and effective non-Hermitian Hamiltonians.

Every Hamiltonian lives in the single-excitation subspace of an emitter
coupled to one or two cavity modes. Decay is folded into the diagonal as
``-i*kappa`` (cavity photon) and ``-i*gamma`` (atomic excitation); the
absorbing vacuum is never represented, its population is ``1 - |psi|^2``.
All matrices are in units of angular frequency (H / hbar).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

__all__ = [
    "ConfigurationError",
    "DegenerateRatesError",
    "Scheme",
    "Rates",
    "ModelSpec",
    "EffectiveHamiltonian",
    "build_two_level",
    "build_two_level_birefringent",
    "build_three_level",
    "build_n_level_chain",
    "build",
    "transform_basis",
    "photon_block_rotation",
    "circular_to_linear",
    "excited_state",
]

SQRT1_2 = 1.0 / math.sqrt(2.0)


class ConfigurationError(ValueError):
    """A parameter set does not fit the requested level scheme."""


class DegenerateRatesError(ValueError):
    """A derived quantity (cooperativity, Purcell factor) is undefined."""


class Scheme(str, enum.Enum):
    TWO_LEVEL = "two-level"
    TWO_LEVEL_BIREFRINGENT = "two-level-biref"
    THREE_LEVEL = "three-level"
    N_LEVEL_CHAIN = "n-level-chain"

    @classmethod
    def parse(cls, name: "str | Scheme") -> "Scheme":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "two-level-birefringent": cls.TWO_LEVEL_BIREFRINGENT,
            "biref": cls.TWO_LEVEL_BIREFRINGENT,
            "chain": cls.N_LEVEL_CHAIN,
            "n-level": cls.N_LEVEL_CHAIN,
            "three-level-biref": cls.THREE_LEVEL,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ConfigurationError(f"unknown scheme {name!r}; choose from {names}") from None


# Rates fields each scheme is allowed to read (besides g, kappa, gamma).
_SCHEME_FIELDS = {
    Scheme.TWO_LEVEL: ("delta_c",),
    Scheme.TWO_LEVEL_BIREFRINGENT: ("delta_c", "delta_p"),
    Scheme.THREE_LEVEL: ("delta_c", "delta_p", "delta_z"),
    Scheme.N_LEVEL_CHAIN: ("omega",),
}
_OPTIONAL_FIELDS = ("delta_c", "delta_p", "delta_z", "omega")


@dataclass(frozen=True)
class Rates:
    """Physical rates of one emitter-cavity instance.

    All values share one angular-frequency unit. ``kappa`` is the cavity
    field decay rate and ``gamma`` the atomic amplitude decay rate, so the
    uncoupled atom decays at ``2*gamma``.
    """

    g: float
    kappa: float
    gamma: float
    delta_c: float = 0.0
    delta_p: float = 0.0
    delta_z: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "gamma", *_OPTIONAL_FIELDS):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        for name in ("g", "kappa", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def cooperativity(self) -> float:
        """C = g^2 / (2 kappa gamma)."""
        if self.kappa * self.gamma <= 0:
            raise DegenerateRatesError(
                "cooperativity undefined when kappa*gamma = 0 "
                f"(kappa={self.kappa}, gamma={self.gamma})")
        return self.g ** 2 / (2.0 * self.kappa * self.gamma)

    @property
    def purcell_factor(self) -> float:
        return 2.0 * self.cooperativity

    def scaled(self, s: float) -> "Rates":
        """Every rate multiplied by ``s`` (time axis rescales by 1/s)."""
        if s <= 0:
            raise ValueError("scale factor must be positive")
        return Rates(**{k: s * v for k, v in self.as_dict().items()})

    def with_(self, **changes) -> "Rates":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("g", "kappa", "gamma", *_OPTIONAL_FIELDS)}

    @classmethod
    def from_cooperativity(cls, C: float, kappa_over_gamma: float, g: float = 1.0,
                           **extra) -> "Rates":
        """Rates with coupling ``g`` fixed and ``kappa/gamma`` fixed at cooperativity ``C``.

        From C = g^2 / (2 kappa gamma) with kappa = r*gamma:
        gamma = g / sqrt(2 C r).
        """
        if C <= 0 or kappa_over_gamma <= 0:
            raise ValueError("cooperativity and kappa/gamma must be positive")
        gamma = g / math.sqrt(2.0 * C * kappa_over_gamma)
        return cls(g=g, kappa=kappa_over_gamma * gamma, gamma=gamma, **extra)


@dataclass(frozen=True)
class ModelSpec:
    scheme: Scheme
    rates: Rates
    n: int = 1
    basis: str = "circular"

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.n < 1:
            raise ConfigurationError(f"ground-state count n must be >= 1, got {self.n}")

    def build(self) -> "EffectiveHamiltonian":
        return build(self)

    @property
    def multiplicity(self) -> int:
        """Number of photon-emitting states reachable at strong coupling."""
        return {
            Scheme.TWO_LEVEL: 1,
            Scheme.TWO_LEVEL_BIREFRINGENT: 2,
            Scheme.THREE_LEVEL: 4,
            Scheme.N_LEVEL_CHAIN: self.n,
        }[self.scheme]


def _as_mask(values, dim) -> Optional[np.ndarray]:
    if values is None:
        return None
    mask = np.asarray(values, dtype=bool)
    if mask.shape != (dim,):
        raise ValueError(f"mask must have shape ({dim},), got {mask.shape}")
    mask.setflags(write=False)
    return mask


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    """Complex matrix on a labelled single-excitation basis.

    ``cavity_mask`` flags states with one cavity photon, ``excited_mask``
    states with the atom excited. ``plus_mask`` flags states whose photon is
    in the atom-coupled circular mode; it is ``None`` when that mode is not a
    basis direction (e.g. the linear basis or after a mixing rotation).
    """

    matrix: np.ndarray
    labels: tuple
    cavity_mask: Optional[np.ndarray]
    excited_mask: Optional[np.ndarray]
    plus_mask: Optional[np.ndarray] = None
    kappa: float = 0.0
    gamma: float = 0.0
    scheme: Optional[Scheme] = None
    rotated: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        dim = m.shape[0]
        if len(self.labels) != dim:
            raise ValueError("one label per basis state required")
        object.__setattr__(self, "labels", tuple(self.labels))
        for name in ("cavity_mask", "excited_mask", "plus_mask"):
            object.__setattr__(self, name, _as_mask(getattr(self, name), dim))
        if self.cavity_mask is not None and self.excited_mask is not None:
            if np.any(self.cavity_mask == self.excited_mask):
                raise ValueError("cavity and excited masks must partition the basis")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def decay_diagonal(self) -> np.ndarray:
        """Diagonal D of the anti-Hermitian part, H = S - iD."""
        if self.cavity_mask is None or self.excited_mask is None:
            raise ValueError("decay assignment needs cavity and excited masks")
        return np.where(self.cavity_mask, self.kappa, self.gamma).astype(float)

    @property
    def hermitian_part(self) -> np.ndarray:
        return 0.5 * (self.matrix + self.matrix.conj().T)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        scale = max(1.0, np.abs(self.matrix).max())
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=atol * scale))

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def basis_state(self, label: str) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(label)] = 1.0
        return psi

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)


def excited_state(h: EffectiveHamiltonian) -> np.ndarray:
    """Atom excited, cavity empty: the default initial state of every scheme."""
    if h.excited_mask is None or h.excited_mask.sum() != 1:
        raise ValueError("Hamiltonian has no unique excited state")
    psi = np.zeros(h.dim, dtype=complex)
    psi[np.flatnonzero(h.excited_mask)[0]] = 1.0
    return psi


def _reject_foreign(rates: Rates, scheme: Scheme):
    allowed = _SCHEME_FIELDS[scheme]
    foreign = [k for k in _OPTIONAL_FIELDS if k not in allowed and getattr(rates, k) != 0.0]
    if foreign:
        raise ConfigurationError(
            f"{scheme.value} does not use {', '.join(foreign)}; set them to zero")


def build_two_level(rates: Rates) -> EffectiveHamiltonian:
    """Two-level atom in a single-mode cavity on {|e,0>, |u,1>}."""
    _reject_foreign(rates, Scheme.TWO_LEVEL)
    g, k, y = rates.g, rates.kappa, rates.gamma
    m = np.array([[rates.delta_c - 1j * y, -g],
                  [-g, -1j * k]])
    return EffectiveHamiltonian(
        m, ("e,0", "u,1"), cavity_mask=[False, True], excited_mask=[True, False],
        plus_mask=[False, True], kappa=k, gamma=y, scheme=Scheme.TWO_LEVEL)


def circular_to_linear() -> np.ndarray:
    """Real orthogonal map from {e, +, -} to {e, X, Y} amplitudes.

    X = (|+> - |->)/sqrt2 sits at +delta_p/2, Y = (|+> + |->)/sqrt2 at
    -delta_p/2. The complex phases of the physical linear modes are absorbed
    into this gauge; only populations are observable.
    """
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, SQRT1_2, -SQRT1_2],
                     [0.0, SQRT1_2, SQRT1_2]])


def build_two_level_birefringent(rates: Rates, basis: str = "circular") -> EffectiveHamiltonian:
    """Two-level atom emitting sigma+ light into a birefringent cavity.

    In the circular basis {|e,0,0>, |u,1+,0>, |u,0,1->} the atom couples only
    to the + mode and birefringence couples the two photon modes at
    ``-delta_p/2``. In the linear basis the photon modes are the cavity
    eigenmodes at ``delta_c +- delta_p/2``, each coupled at ``-g/sqrt2``.
    """
    _reject_foreign(rates, Scheme.TWO_LEVEL_BIREFRINGENT)
    g, k, y = rates.g, rates.kappa, rates.gamma
    dc, dp = rates.delta_c, rates.delta_p
    if basis == "circular":
        m = np.array([[-1j * y, -g, 0.0],
                      [-g, dc - 1j * k, -dp / 2],
                      [0.0, -dp / 2, dc - 1j * k]])
        labels = ("e,0,0", "u,1+,0", "u,0,1-")
        plus = [False, True, False]
    elif basis == "linear":
        gl = g * SQRT1_2
        m = np.array([[-1j * y, -gl, -gl],
                      [-gl, dc + dp / 2 - 1j * k, 0.0],
                      [-gl, 0.0, dc - dp / 2 - 1j * k]])
        labels = ("e,0,0", "u,1X,0", "u,0,1Y")
        plus = None
    else:
        raise ConfigurationError(f"basis must be 'circular' or 'linear', got {basis!r}")
    return EffectiveHamiltonian(
        m, labels, cavity_mask=[False, True, True], excited_mask=[True, False, False],
        plus_mask=plus, kappa=k, gamma=y, scheme=Scheme.TWO_LEVEL_BIREFRINGENT,
        meta={"basis": basis})


def build_three_level(rates: Rates) -> EffectiveHamiltonian:
    """Lambda-system with Zeeman-split ground states in a birefringent cavity.

    Basis order: |u+,1+,0>, |u+,0,1->, |u-,1+,0>, |u-,0,1->, |e0,0,0>.
    """
    _reject_foreign(rates, Scheme.THREE_LEVEL)
    g, k, y = rates.g, rates.kappa, rates.gamma
    dc, dp, dz = rates.delta_c, rates.delta_p, rates.delta_z
    c = dc - 1j * k
    m = np.array([
        [-dz / 2 + c, -dp / 2, 0.0, 0.0, -g],
        [-dp / 2, -dz / 2 + c, 0.0, 0.0, 0.0],
        [0.0, 0.0, dz / 2 + c, -dp / 2, 0.0],
        [0.0, 0.0, -dp / 2, dz / 2 + c, -g],
        [-g, 0.0, 0.0, -g, -1j * y],
    ])
    labels = ("u+,1+,0", "u+,0,1-", "u-,1+,0", "u-,0,1-", "e0,0,0")
    return EffectiveHamiltonian(
        m, labels,
        cavity_mask=[True, True, True, True, False],
        excited_mask=[False, False, False, False, True],
        plus_mask=[True, False, True, False, False],
        kappa=k, gamma=y, scheme=Scheme.THREE_LEVEL)


def build_n_level_chain(rates: Rates, n: int) -> EffectiveHamiltonian:
    """Excited state coupled to |u1,1>, with n ground states chained at omega.

    Neighbouring ground states couple through ``-omega/2``, the same
    convention as the birefringent photon-mode coupling ``-delta_p/2``, so a
    chain with n=2 is the birefringent two-level model with omega = delta_p.
    """
    if n < 1:
        raise ConfigurationError(f"ground-state count n must be >= 1, got {n}")
    _reject_foreign(rates, Scheme.N_LEVEL_CHAIN)
    dim = n + 1
    m = np.zeros((dim, dim), dtype=complex)
    m[0, 0] = -1j * rates.gamma
    m[0, 1] = m[1, 0] = -rates.g
    for i in range(1, dim):
        m[i, i] = -1j * rates.kappa
    for i in range(1, n):
        m[i, i + 1] = m[i + 1, i] = -rates.omega / 2
    labels = ("e,0",) + tuple(f"u{i},1" for i in range(1, n + 1))
    cavity = [False] + [True] * n
    return EffectiveHamiltonian(
        m, labels, cavity_mask=cavity, excited_mask=[True] + [False] * n,
        plus_mask=cavity, kappa=rates.kappa, gamma=rates.gamma,
        scheme=Scheme.N_LEVEL_CHAIN, meta={"n": n})


def build(spec: ModelSpec) -> EffectiveHamiltonian:
    if spec.scheme is Scheme.TWO_LEVEL:
        return build_two_level(spec.rates)
    if spec.scheme is Scheme.TWO_LEVEL_BIREFRINGENT:
        return build_two_level_birefringent(spec.rates, spec.basis)
    if spec.scheme is Scheme.THREE_LEVEL:
        return build_three_level(spec.rates)
    return build_n_level_chain(spec.rates, spec.n)


def photon_block_rotation() -> np.ndarray:
    """Orthogonal U diagonalising the photon block of the three-level matrix."""
    b = SQRT1_2 * np.array([[1.0, 1.0], [-1.0, 1.0]])
    u = np.zeros((5, 5))
    u[:2, :2] = b
    u[2:4, 2:4] = b
    u[4, 4] = 1.0
    return u


def _preserves(u: np.ndarray, mask: Optional[np.ndarray], atol: float) -> bool:
    if mask is None:
        return False
    return (np.abs(u[np.ix_(mask, ~mask)]).max(initial=0.0) <= atol
            and np.abs(u[np.ix_(~mask, mask)]).max(initial=0.0) <= atol)


def transform_basis(h: EffectiveHamiltonian, u, atol: float = 1e-12) -> EffectiveHamiltonian:
    """Return ``u @ H @ u.T`` for a real orthogonal ``u``.

    Masks survive only if ``u`` maps each mask class onto itself. Labels
    survive if ``u`` is a signed permutation; otherwise they become
    ``"v0", "v1", ...`` and the result is flagged ``rotated``.
    """
    u = np.asarray(u)
    if np.iscomplexobj(u):
        if np.abs(u.imag).max() > atol:
            raise ValueError("basis change must be real orthogonal")
        u = u.real
    u = u.astype(float)
    if u.shape != (h.dim, h.dim):
        raise ValueError(f"basis change has shape {u.shape}, Hamiltonian is {h.dim}x{h.dim}")
    if not np.allclose(u.T @ u, np.eye(h.dim), rtol=0, atol=atol):
        raise ValueError("basis change is not orthogonal (u.T u != I)")

    m = u @ h.matrix @ u.T
    is_perm = np.all(np.isclose(np.abs(u), 0, atol=atol) | np.isclose(np.abs(u), 1, atol=atol))
    if is_perm:
        order = np.abs(u).argmax(axis=1)
        labels = tuple(h.labels[j] for j in order)
        masks = {name: (None if getattr(h, name) is None else getattr(h, name)[order])
                 for name in ("cavity_mask", "excited_mask", "plus_mask")}
        rotated = h.rotated
    else:
        labels = tuple(f"v{i}" for i in range(h.dim))
        masks = {name: (getattr(h, name) if _preserves(u, getattr(h, name), atol) else None)
                 for name in ("cavity_mask", "excited_mask", "plus_mask")}
        if masks["cavity_mask"] is None or masks["excited_mask"] is None:
            masks["cavity_mask"] = masks["excited_mask"] = None
        rotated = True
    return EffectiveHamiltonian(
        m, labels, kappa=h.kappa, gamma=h.gamma, scheme=h.scheme, rotated=rotated,
        meta=dict(h.meta), **masks)
