"""Model calculus for asymptotic spectral invariants over an idempotent split.

Spectral invariants are not computed from dynamics.  The only evaluation
rule is constancy: if a region is superheavy for ``e`` and ``H`` is constant
``r`` on it, then ``zeta_e(H) = r``.  Around that rule sit the max formula
for the unit, the differences ``mu_ij = zeta_i - zeta_j`` and the
asymptotic spectral norm ``gamma_bar = max_ij mu_ij``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .geometry import min_chordal_distance

CONSTANCY_TOL = 1e-9
EIGEN_TOL = 1e-8
HESSIAN_FLOOR = 1e-6


class SpectralError(ValueError):
    pass


class EvidenceError(SpectralError):
    pass


class OverlapError(SpectralError):
    pass


# -- vectors ------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralVector:
    values: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, label):
        try:
            return self.values[label]
        except KeyError:
            raise SpectralError(f"missing label {label!r}") from None

    def labels(self):
        return list(self.values)

    def require(self, labels) -> None:
        missing = [lab for lab in labels if lab not in self.values]
        if missing:
            raise SpectralError(f"missing label(s) {missing}")

    def shifted(self, c: float) -> "SpectralVector":
        return SpectralVector({k: v + c for k, v in self.values.items()})

    def scaled(self, c: float) -> "SpectralVector":
        return SpectralVector({k: v * c for k, v in self.values.items()})

    def negated(self) -> "SpectralVector":
        return self.scaled(-1.0)


def zeta_unit(v: SpectralVector, labels=None) -> float:
    """``zeta_{1_X} = max_j zeta_{e_j}``."""
    if labels is not None:
        v.require(labels)
    if not v.values:
        raise SpectralError("empty spectral vector")
    return max(v.values.values())


def mu_pair(v: SpectralVector, i: str, j: str) -> float:
    return v[i] - v[j]


def gamma_bar(v: SpectralVector, labels=None) -> float:
    """``max_{i,j} mu_ij``; equal to ``max - min``."""
    if labels is not None:
        v.require(labels)
    keys = list(v.values)
    if not keys:
        raise SpectralError("empty spectral vector")
    return max(mu_pair(v, i, j) for i in keys for j in keys)


def gamma_bar_via_units(v: SpectralVector) -> float:
    """Same value as :func:`gamma_bar`, as ``zeta_1(v) + zeta_1(-v)``."""
    return zeta_unit(v) + zeta_unit(v.negated())


# -- regions and evidence -------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """A named subset, represented by sample points or declared abstractly."""

    name: str
    samples: np.ndarray | None = None
    source: str = "sampled"

    @property
    def sampled(self) -> bool:
        return self.samples is not None and len(self.samples) > 0


@dataclass(frozen=True)
class Evidence:
    """Either an eigenvalue/critical-value match or a cited assertion."""

    kind: str  # "aks" or "citation"
    eigenvalue: complex | None = None
    critical_value: complex | None = None
    hessian_min_singular: float | None = None
    citation: str = ""

    def check(self) -> None:
        if self.kind == "aks":
            if self.eigenvalue is None or self.critical_value is None or self.hessian_min_singular is None:
                raise EvidenceError("AKS evidence needs eigenvalue, critical value and Hessian bound")
            err = abs(self.eigenvalue - self.critical_value)
            if err > EIGEN_TOL:
                raise EvidenceError(f"critical value misses eigenvalue by {err:.3e}")
            if self.hessian_min_singular < HESSIAN_FLOOR:
                raise EvidenceError(f"degenerate critical point (sigma_min = {self.hessian_min_singular:.3e})")
        elif self.kind == "citation":
            if not self.citation.strip():
                raise EvidenceError("citation evidence needs a nonempty citation")
        else:
            raise EvidenceError(f"unknown evidence kind {self.kind!r}")

    def as_dict(self) -> dict:
        cx = lambda c: None if c is None else [float(np.real(c)), float(np.imag(c))]  # noqa: E731
        return {
            "kind": self.kind,
            "eigenvalue": cx(self.eigenvalue),
            "critical_value": cx(self.critical_value),
            "hessian_min_singular": self.hessian_min_singular,
            "citation": self.citation,
        }


@dataclass(frozen=True)
class SuperheavyRegistry:
    entries: Mapping[str, tuple[Region, tuple[Evidence, ...]]] = field(default_factory=dict)
    disjoint_pairs: frozenset = frozenset()  # declared pairs of region names, with citation
    disjoint_citation: str = ""

    def labels(self):
        return list(self.entries)

    def region(self, label) -> Region:
        return self.entries[label][0]


def register_superheavy(reg: SuperheavyRegistry, label: str, region: Region, evidence) -> SuperheavyRegistry:
    """Return a registry extended by ``label -> region``, after checking evidence."""
    if isinstance(evidence, Evidence):
        evidence = (evidence,)
    evidence = tuple(evidence)
    if not evidence:
        raise EvidenceError("no evidence given")
    for ev in evidence:
        ev.check()
    entries = dict(reg.entries)
    entries[label] = (region, evidence)
    return SuperheavyRegistry(entries, reg.disjoint_pairs, reg.disjoint_citation)


# -- model Hamiltonians ---------------------------------------------------------

def bump(r):
    """Smooth, 1 for ``r <= 1``, 0 for ``r >= 2``."""
    r = np.asarray(r, dtype=float)

    def psi(x):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)

    a, b = psi(2.0 - r), psi(r - 1.0)
    return a / (a + b)


@dataclass
class ModelHamiltonian:
    """``H = bg + sum_i (v_i - bg) beta(d(x, R_i) / delta)``.

    Constant ``v_i`` on each region as long as the regions are at least
    ``2 delta`` apart, which :meth:`check_separation` verifies on samples
    (or against declared disjointness for abstract regions).
    """

    regions: list[tuple[Region, float]]
    delta: float
    background: float = 0.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("bump width must be positive")

    def scaled(self, k: float) -> "ModelHamiltonian":
        return ModelHamiltonian([(r, k * v) for r, v in self.regions], self.delta, k * self.background)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        out = np.full(len(X), float(self.background))
        for region, value in self.regions:
            if not region.sampled:
                continue
            inner = np.abs(X @ np.conj(region.samples).T).max(axis=1)
            d = np.sqrt(np.maximum(4.0 - 2.0 * inner, 0.0))
            out += (value - self.background) * bump(d / self.delta)
        return out

    def value_on(self, region: Region) -> tuple[float, float]:
        """``(value, spread)`` of ``H`` on a region."""
        for r, v in self.regions:
            if r.name == region.name and not region.sampled:
                return float(v), 0.0
        if not region.sampled:
            return float(self.background), 0.0
        vals = self(region.samples)
        return float(vals.mean()), float(vals.max() - vals.min())

    def check_separation(self, declared=frozenset()) -> dict:
        out = {}
        for (ra, _), (rb, _) in itertools.combinations(self.regions, 2):
            key = f"{ra.name}|{rb.name}"
            if ra.sampled and rb.sampled:
                d = min_chordal_distance(ra.samples, rb.samples)
                if d < 2 * self.delta:
                    raise OverlapError(f"regions {ra.name} and {rb.name} are {d:.3g} apart, need {2 * self.delta:.3g}")
                out[key] = d
            elif frozenset((ra.name, rb.name)) in declared:
                out[key] = "declared"
            else:
                raise OverlapError(f"no separation evidence for {ra.name} and {rb.name}")
        return out


def zeta_from_constancy(reg: SuperheavyRegistry, H: ModelHamiltonian) -> SpectralVector:
    out = {}
    for label, (region, _) in reg.entries.items():
        value, spread = H.value_on(region)
        if spread > CONSTANCY_TOL:
            raise SpectralError(f"H is not constant on {region.name} (spread {spread:.3e})")
        out[label] = value
    return SpectralVector(out)


# -- certificates ---------------------------------------------------------------

@dataclass
class Certificate:
    space: str
    gap: float | None
    delta: float
    pairs: list[dict]
    separation: dict
    evidence: dict

    @property
    def verdict(self) -> bool:
        return all(p["distinct"] for p in self.pairs)

    def as_dict(self) -> dict:
        return {
            "space": self.space,
            "gap": self.gap,
            "delta": self.delta,
            "pairs": self.pairs,
            "separation": {k: v for k, v in sorted(self.separation.items())},
            "evidence": self.evidence,
            "verdict": self.verdict,
        }


def _pair_record(reg, H, i, j):
    v = zeta_from_constancy(reg, H)
    return {
        "high": i,
        "low": j,
        "zeta": {k: v[k] for k in sorted(v.values)},
        "mu": mu_pair(v, i, j),
        "gamma_bar": gamma_bar(v),
        "gamma_bar_units": gamma_bar_via_units(v),
        "distinct": v[i] != v[j],
        "statement": f"zeta_{i} != zeta_{j}" if v[i] != v[j] else f"zeta_{i} == zeta_{j}",
    }


def separation_certificate(
    reg: SuperheavyRegistry,
    space: str,
    gap: float | None = None,
    delta: float | None = None,
) -> Certificate:
    """Pairwise separation verdicts for every two registered idempotents.

    For each ordered choice ``(i, j)`` with ``i < j`` the model Hamiltonian
    is 1 near the region of ``i``, 0 near the region of ``j`` and 0 in the
    background; constancy then gives ``mu_ij = 1``.  ``delta`` defaults to
    ``gap / 4``.
    """
    if delta is None:
        if gap is None or not gap > 0:
            raise SpectralError("disjointness gap must be positive")
        delta = gap / 4.0
    labels = reg.labels()
    if len(labels) < 2:
        raise SpectralError("need at least two registered idempotents")
    all_regions = [(reg.region(lab), 0.0) for lab in labels]
    sep = ModelHamiltonian(all_regions, delta).check_separation(reg.disjoint_pairs)
    pairs = []
    for i, j in itertools.combinations(labels, 2):
        regions = [(reg.region(lab), 1.0 if lab == i else 0.0) for lab in labels]
        H = ModelHamiltonian(regions, delta)
        pairs.append(_pair_record(reg, H, i, j))
    evidence = {lab: [e.as_dict() for e in reg.entries[lab][1]] for lab in labels}
    return Certificate(space, gap, delta, pairs, sep, evidence)


# -- registry files ---------------------------------------------------------------

def load_registry(path, table=None, decomposition=None) -> SuperheavyRegistry:
    """Read a JSON registry of abstract (ingested) regions.

    An entry names its idempotent either by ``label`` or by
    ``c1_eigenvalue``, optionally narrowed by ``witness_class``: the fine
    idempotents with that eigenvalue which do not annihilate the class.
    The selected fine idempotents are joined into one label; two regions
    may not share a fine idempotent.
    """
    data = json.loads(Path(path).read_text())
    if decomposition is None and table is not None:
        from .algebra import primitive_idempotents

        decomposition = primitive_idempotents(table)
    reg = SuperheavyRegistry(
        disjoint_pairs=frozenset(frozenset(p) for p in data.get("disjoint_pairs", [])),
        disjoint_citation=data.get("disjoint_citation", ""),
    )
    if reg.disjoint_pairs and not reg.disjoint_citation.strip():
        raise EvidenceError("declared disjointness needs a citation")
    taken: dict[str, str] = {}
    for ent in data["entries"]:
        label = ent.get("label")
        if label is None:
            if decomposition is None or table is None:
                raise SpectralError("eigenvalue-keyed entries need the algebra table")
            fine = _fine_for_eigenvalue(table, decomposition, complex(*ent["c1_eigenvalue"]), ent.get("witness_class"))
            for f in fine:
                if f in taken:
                    raise OverlapError(f"idempotent {f} claimed by both {taken[f]} and {ent['region']}")
                taken[f] = ent["region"]
            label = "+".join(fine)
        ev = ent["evidence"]
        evidence = Evidence(
            kind=ev["kind"],
            eigenvalue=None if ev.get("eigenvalue") is None else complex(*ev["eigenvalue"]),
            critical_value=None if ev.get("critical_value") is None else complex(*ev["critical_value"]),
            hessian_min_singular=ev.get("hessian_min_singular"),
            citation=ev.get("citation", ""),
        )
        reg = register_superheavy(reg, label, Region(ent["region"], None, "ingested"), evidence)
    return reg


def _fine_for_eigenvalue(table, d, mu: complex, witness=None) -> list[str]:
    eig = np.array(d.c1_eigenvalues)
    hits = [lab for lab, e in zip(d.labels, eig) if abs(e - mu) <= EIGEN_TOL * max(1.0, abs(mu))]
    if not hits:
        raise SpectralError(f"no idempotent with c1-eigenvalue {mu}")
    if witness:
        w = table.element(witness).evaluate(1.0)
        hits = [
            lab for lab in hits
            if np.abs(table.numeric_product(d.by_label(lab).evaluate(1.0), w, 1.0)).max() > EIGEN_TOL
        ]
        if not hits:
            raise SpectralError(f"every idempotent with c1-eigenvalue {mu} annihilates the witness class")
    return hits


def del_pezzo_certificate(registry_path, table_path=None, delta: float = 1.0) -> Certificate:
    """Pairwise certificates from an ingested table and registry.

    Regions are abstract, so separation rests on the cited disjointness and
    the bump width ``delta`` is nominal.
    """
    from .algebra import ingest_table, is_semisimple, primitive_idempotents

    registry_path = Path(registry_path)
    data = json.loads(registry_path.read_text())
    if table_path is None:
        table_path = registry_path.parent / data["table"]
    table = ingest_table(table_path)
    if not is_semisimple(table):
        raise SpectralError(f"{table.name} is not semisimple")
    d = primitive_idempotents(table)
    reg = load_registry(registry_path, table, d)
    cert = separation_certificate(reg, data.get("space", table.name), delta=delta)
    cert.evidence["table"] = {
        "name": table.name,
        "semisimple": True,
        "field_factors": len(d),
        "c1_eigenvalues": [[float(np.real(c)), float(np.imag(c))] for c in d.c1_eigenvalues],
    }
    cert.evidence["regions"] = {lab: reg.region(lab).name for lab in reg.labels()}
    return cert


# -- quadrics -------------------------------------------------------------------

SPHERE_CITATION = (
    "closed-open map sends the zero-eigenvalue idempotent to the unit of "
    "HF(S^n_van); heavy for a field-factor unit, hence superheavy"
)


def fine_quadric_registry(n: int, count: int = 200, seed: int = 0, points=None):
    """Fine registry: every ``e_{+,i}`` on the torus, each ``e_-`` factor on the sphere.

    Returns ``(registry, decomposition)``.  Torus evidence pairs the
    idempotent's ``c_1``-eigenvalue with a critical value of ``W``; sphere
    evidence is the cited closed-open computation.
    """
    from .algebra import builtin_quadric_table, primitive_idempotents
    from .geometry import sample_sphere, sample_torus
    from .superpotential import closed_form_critical_points

    if n < 2:
        raise ValueError("needs n >= 2")
    table = builtin_quadric_table(n)
    d = primitive_idempotents(table)
    if points is None:
        points = closed_form_critical_points(n)
    torus = Region("torus", sample_torus(n, count, seed))
    sphere = Region("sphere", sample_sphere(n, count, seed + 1))
    reg = SuperheavyRegistry()
    for lab, mu in zip(d.labels, d.c1_eigenvalues):
        if d.coarse_grouping[lab] == "e+":
            best = min(points, key=lambda p: abs(p.value - mu))
            ev = Evidence("aks", complex(mu), complex(best.value), float(best.hessian_min_singular))
            reg = register_superheavy(reg, lab, torus, ev)
        else:
            reg = register_superheavy(reg, lab, sphere, Evidence("citation", citation=SPHERE_CITATION))
    return reg, d


def collapse(reg: SuperheavyRegistry, grouping: Mapping[str, str]) -> SuperheavyRegistry:
    """Laurent-level registry: one entry per coarse idempotent, evidence pooled.

    All fine idempotents under one coarse idempotent must share a region;
    the asymptotic invariants of the coarse unit and of any of its
    fine factors then coincide.
    """
    pooled: dict[str, list] = {}
    for fine, (region, evidence) in reg.entries.items():
        c = grouping[fine]
        if c in pooled and pooled[c][0].name != region.name:
            raise SpectralError(f"fine idempotents under {c} sit on different regions")
        pooled.setdefault(c, [region, []])[1].extend(evidence)
    out = SuperheavyRegistry(disjoint_pairs=reg.disjoint_pairs, disjoint_citation=reg.disjoint_citation)
    for c in sorted(pooled):
        region, evidence = pooled[c]
        out = register_superheavy(out, c, region, evidence)
    return out


def default_quadric_registry(n: int, count: int = 200, seed: int = 0, points=None) -> SuperheavyRegistry:
    """``{e+ -> torus, e- -> sphere}`` for ``Q^n``."""
    reg, d = fine_quadric_registry(n, count, seed, points)
    return collapse(reg, d.coarse_grouping)


def report_hash(report: dict) -> str:
    blob = json.dumps(report, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def quadric_certificate(n: int, count: int = 1000, seed: int = 0, points=None) -> Certificate:
    """Separation certificate for ``Q^n``: ``zeta_+(H) = 1``, ``zeta_-(H) = 0``."""
    from .geometry import disjointness_report

    geo = disjointness_report(n, count, seed)
    if not geo.passed or not geo.gap > 0:
        raise SpectralError(f"disjointness report failed for n = {n} (gap {geo.gap:.3g})")
    reg = default_quadric_registry(n, min(count, 200), seed, points)
    cert = separation_certificate(reg, f"Q{n}", gap=geo.gap)
    cert.evidence["geometry_report"] = geo.as_dict()
    cert.evidence["geometry_report_sha256"] = report_hash(geo.as_dict())
    return cert
