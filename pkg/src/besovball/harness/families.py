"""Seeded test-function families."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..holopoly import HoloPoly, monomial_basis

__all__ = ["GENERATORS", "TestFamily", "generate_family", "load_polys", "save_polys"]

GENERATORS = ("randomDecay", "lacunary", "monomial", "blockConcentrated", "userFile")


@dataclass(frozen=True)
class TestFamily:
    """Recipe for a list of polynomials.

    ``options`` holds generator parameters: ``gamma`` (decay rate) for
    ``randomDecay`` and ``lacunary``, ``levels`` for ``lacunary``, ``alpha``
    (a multi-index) for ``monomial``, ``nu`` for ``blockConcentrated`` and
    ``path`` for ``userFile``.
    """

    __test__ = False  # not a pytest class

    generator: str = "randomDecay"
    count: int = 8
    seed: int = 0
    dim: int = 2
    max_degree: int = 16
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigurationError(f"unknown family generator {self.generator!r}; known: {', '.join(GENERATORS)}")
        if self.count < 0 or self.dim < 1 or self.max_degree < 1:
            raise ConfigurationError("family needs count >= 0, dim >= 1, maxDegree >= 1")

    def with_degree(self, max_degree: int) -> "TestFamily":
        return TestFamily(self.generator, self.count, self.seed, self.dim, max_degree, dict(self.options))

    def with_count(self, count: int) -> "TestFamily":
        return TestFamily(self.generator, count, self.seed, self.dim, self.max_degree, dict(self.options))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["maxDegree"] = d.pop("max_degree")
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "TestFamily":
        doc = dict(doc)
        if "maxDegree" in doc:
            doc["max_degree"] = doc.pop("maxDegree")
        known = {"generator", "count", "seed", "dim", "max_degree", "options"}
        extra = set(doc) - known
        if extra:
            raise ConfigurationError(f"unknown family keys: {sorted(extra)}")
        return cls(**doc)

    def generate(self) -> list[HoloPoly]:
        return generate_family(self)


def _unit_block(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return v


def _scaled_block(f_dim: int, k: int, v: np.ndarray, target: float) -> np.ndarray:
    moments = monomial_basis(f_dim, k).moments[monomial_basis(f_dim, k).block(k)]
    norm = np.sqrt(np.sum(np.abs(v) ** 2 * moments))
    return v * (target / norm)


def _random_decay(fam: TestFamily, idx: int) -> HoloPoly:
    # degree-k block depends only on (seed, idx, k): families nest under degree doubling
    gamma = float(fam.options.get("gamma", 3.0))
    basis = monomial_basis(fam.dim, fam.max_degree)
    coef = np.zeros(basis.size, dtype=complex)
    for k in range(fam.max_degree + 1):
        rng = np.random.default_rng([fam.seed, idx, k])
        sl = basis.block(k)
        v = _unit_block(rng, sl.stop - sl.start)
        target = (1.0 + k) ** (-gamma) * np.exp(0.5 * rng.standard_normal())
        coef[sl] = _scaled_block(fam.dim, k, v, target)
    return HoloPoly(fam.dim, fam.max_degree, coef)


def _lacunary(fam: TestFamily, idx: int) -> HoloPoly:
    gamma = float(fam.options.get("gamma", 1.0))
    levels = int(fam.options.get("levels", 64))
    basis = monomial_basis(fam.dim, fam.max_degree)
    coef = np.zeros(basis.size, dtype=complex)
    nu = 0
    while nu <= levels and 2 ** nu <= fam.max_degree:
        k = 2 ** nu
        rng = np.random.default_rng([fam.seed, idx, k])
        sl = basis.block(k)
        coef[sl] = _scaled_block(fam.dim, k, _unit_block(rng, sl.stop - sl.start), 2.0 ** (-gamma * nu))
        nu += 1
    return HoloPoly(fam.dim, fam.max_degree, coef)


def _monomial(fam: TestFamily, idx: int) -> HoloPoly:
    alpha = fam.options.get("alpha")
    if alpha is None:
        rng = np.random.default_rng([fam.seed, idx])
        top = int(fam.options.get("maxMonomialDegree", 8))
        k = int(rng.integers(1, top + 1))
        cuts = np.sort(rng.integers(0, k + 1, size=fam.dim - 1))
        alpha = np.diff(np.concatenate([[0], cuts, [k]]))
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != fam.dim:
        raise ConfigurationError(f"monomial exponent {alpha} does not match dim {fam.dim}")
    if sum(alpha) > fam.max_degree:
        raise ConfigurationError(f"monomial degree {sum(alpha)} exceeds maxDegree {fam.max_degree}")
    return HoloPoly.monomial(alpha, 1.0, fam.max_degree)


def _block_concentrated(fam: TestFamily, idx: int) -> HoloPoly:
    from ..lpblocks import psi

    nu = int(fam.options.get("nu", 3))
    basis = monomial_basis(fam.dim, fam.max_degree)
    coef = np.zeros(basis.size, dtype=complex)
    for k in range(fam.max_degree + 1):
        w = float(psi(k / 2.0 ** (nu - 1))) if nu >= 1 else float(k <= 1)
        if w == 0:
            continue
        rng = np.random.default_rng([fam.seed, idx, k])
        sl = basis.block(k)
        coef[sl] = w * _scaled_block(fam.dim, k, _unit_block(rng, sl.stop - sl.start), 1.0)
    return HoloPoly(fam.dim, fam.max_degree, coef)


def load_polys(path) -> list[HoloPoly]:
    """Read one polynomial or a list of polynomials from a JSON file."""
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict) and "functions" in doc:
        doc = doc["functions"]
    if isinstance(doc, dict):
        doc = [doc]
    return [HoloPoly.from_dict(d) for d in doc]


def save_polys(polys, path) -> None:
    with open(path, "w") as fh:
        json.dump({"functions": [g.to_dict() for g in polys]}, fh, indent=1)


def _user_file(fam: TestFamily) -> list[HoloPoly]:
    path = fam.options.get("path")
    if not path:
        raise ConfigurationError("userFile family needs options.path")
    polys = load_polys(path)
    out = []
    for g in polys[: fam.count] if fam.count else polys:
        if g.dim != fam.dim:
            raise ConfigurationError(f"{path}: function has N={g.dim}, family has N={fam.dim}")
        out.append(g.with_max_degree(fam.max_degree))
    return out


_BUILDERS = {
    "randomDecay": _random_decay,
    "lacunary": _lacunary,
    "monomial": _monomial,
    "blockConcentrated": _block_concentrated,
}


def generate_family(fam: TestFamily) -> list[HoloPoly]:
    """Deterministic list of ``fam.count`` polynomials of degree ``<= fam.max_degree``."""
    if fam.generator == "userFile":
        return _user_file(fam)
    build = _BUILDERS[fam.generator]
    return [build(fam, i) for i in range(fam.count)]
