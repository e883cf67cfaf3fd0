import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from quadtoric.algebra import builtin_quadric_table, groups
from quadtoric.geometry import sample_sphere, sample_torus
from quadtoric.spectral import (
    Evidence,
    EvidenceError,
    ModelHamiltonian,
    OverlapError,
    Region,
    SpectralError,
    SpectralVector,
    SuperheavyRegistry,
    bump,
    collapse,
    del_pezzo_certificate,
    fine_quadric_registry,
    gamma_bar,
    gamma_bar_via_units,
    load_registry,
    mu_pair,
    quadric_certificate,
    register_superheavy,
    report_hash,
    separation_certificate,
    zeta_from_constancy,
    zeta_unit,
)

DATA = Path(__file__).resolve().parents[1] / "data"
CITE = Evidence("citation", citation="disjoint by construction")


# -- vectors -------------------------------------------------------------------

def test_vector_functionals():
    v = SpectralVector({"a": 3.0, "b": -1.0, "c": 0.5})
    assert zeta_unit(v) == 3.0
    assert mu_pair(v, "a", "b") == 4.0
    assert gamma_bar(v) == gamma_bar_via_units(v) == 4.0


@pytest.mark.parametrize("c", [-2.0, 0.0, 7.5])
def test_shift_and_scale(c):
    v = SpectralVector({"a": 1.0, "b": 0.25, "c": -3.0})
    # gamma-bar is blind to shifts and scales with positive factors
    assert gamma_bar(v.shifted(c)) == pytest.approx(gamma_bar(v))
    assert zeta_unit(v.shifted(c)) == pytest.approx(zeta_unit(v) + c)
    assert gamma_bar(v.scaled(2.0)) == pytest.approx(2 * gamma_bar(v))
    assert gamma_bar_via_units(v.shifted(c)) == pytest.approx(gamma_bar(v))


def test_vector_errors():
    v = SpectralVector({"a": 1.0})
    with pytest.raises(SpectralError):
        v["b"]
    with pytest.raises(SpectralError):
        zeta_unit(v, ["a", "b"])
    with pytest.raises(SpectralError):
        gamma_bar(SpectralVector({}))


# -- evidence ------------------------------------------------------------------

def test_evidence_checks():
    Evidence("aks", 4.0, 4.0 + 1e-12, 0.3).check()
    with pytest.raises(EvidenceError, match="misses"):
        Evidence("aks", 4.0, 3.9, 0.3).check()
    with pytest.raises(EvidenceError, match="degenerate"):
        Evidence("aks", 4.0, 4.0, 1e-9).check()
    with pytest.raises(EvidenceError):
        Evidence("aks", 4.0).check()
    with pytest.raises(EvidenceError):
        Evidence("citation", citation="  ").check()
    with pytest.raises(EvidenceError):
        Evidence("hunch").check()


def test_register_rejects_bad_evidence():
    reg = SuperheavyRegistry()
    with pytest.raises(EvidenceError):
        register_superheavy(reg, "e", Region("L"), [])
    with pytest.raises(EvidenceError):
        register_superheavy(reg, "e", Region("L"), Evidence("aks", 1.0, 2.0, 1.0))
    reg2 = register_superheavy(reg, "e", Region("L"), CITE)
    assert reg.labels() == [] and reg2.labels() == ["e"]


# -- model Hamiltonians --------------------------------------------------------

def test_bump_profile():
    r = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
    b = bump(r)
    assert b[0] == b[1] == 1.0 and b[3] == b[4] == 0.0
    assert b[2] == pytest.approx(0.5)
    x = np.linspace(0, 3, 301)
    assert np.all(np.diff(bump(x)) <= 0)


def test_overlap_detected():
    T = Region("torus", sample_torus(2, 200, seed=0))
    S = Region("sphere", sample_sphere(2, 200, seed=1))
    # the two sample sets are about 0.52 apart in chordal distance
    ModelHamiltonian([(T, 1.0), (S, 0.0)], 0.2).check_separation()
    with pytest.raises(OverlapError):
        ModelHamiltonian([(T, 1.0), (S, 0.0)], 0.3).check_separation()
    with pytest.raises(OverlapError, match="no separation evidence"):
        ModelHamiltonian([(Region("A"), 1.0), (Region("B"), 0.0)], 1.0).check_separation()
    sep = ModelHamiltonian([(Region("A"), 1.0), (Region("B"), 0.0)], 1.0).check_separation({frozenset("AB")})
    assert sep == {"A|B": "declared"}


def test_constancy_failure():
    T = Region("torus", sample_torus(2, 100, seed=0))
    reg = register_superheavy(SuperheavyRegistry(), "e", T, CITE)
    # a bump as wide as the sampled region is not constant on it
    H = ModelHamiltonian([(Region("probe", T.samples[:1]), 1.0)], 0.1)
    with pytest.raises(SpectralError, match="not constant"):
        zeta_from_constancy(reg, H)


def test_constancy_and_scaling():
    T = Region("torus", sample_torus(3, 100, seed=0))
    S = Region("sphere", sample_sphere(3, 100, seed=1))
    reg = register_superheavy(register_superheavy(SuperheavyRegistry(), "a", T, CITE), "b", S, CITE)
    H = ModelHamiltonian([(T, 1.0), (S, 0.0)], 0.1)
    v = zeta_from_constancy(reg, H)
    assert v["a"] == pytest.approx(1.0) and v["b"] == pytest.approx(0.0)
    v3 = zeta_from_constancy(reg, H.scaled(3.0))
    assert mu_pair(v3, "a", "b") == pytest.approx(3.0)


def test_certificate_needs_two_labels_and_gap():
    reg = register_superheavy(SuperheavyRegistry(), "e", Region("L"), CITE)
    with pytest.raises(SpectralError):
        separation_certificate(reg, "X", delta=1.0)
    with pytest.raises(SpectralError, match="gap"):
        separation_certificate(reg, "X", gap=0.0)


# -- quadrics ------------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 7))
def test_quadric_certificate(n):
    cert = quadric_certificate(n, count=300, seed=n)
    assert cert.verdict
    (p,) = cert.pairs
    assert p["zeta"]["e+"] == pytest.approx(1.0) and p["zeta"]["e-"] == pytest.approx(0.0)
    assert p["mu"] == pytest.approx(1.0)
    assert p["gamma_bar"] == pytest.approx(1.0) and p["gamma_bar_units"] == pytest.approx(1.0)
    assert p["statement"] == "zeta_e+ != zeta_e-"
    assert cert.gap == pytest.approx(2 * (n - 1) / n)
    assert cert.delta == pytest.approx(cert.gap / 4)
    assert cert.evidence["geometry_report_sha256"] == report_hash(cert.evidence["geometry_report"])
    json.dumps(cert.as_dict())


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fine_registry_collapses(n):
    reg, d = fine_quadric_registry(n, count=50, seed=0)
    assert len(reg.labels()) == len(d)
    g = groups(d.coarse_grouping)
    coarse = collapse(reg, d.coarse_grouping)
    assert coarse.labels() == ["e+", "e-"]
    # one AKS match per fine e+ factor survives the collapse
    kinds = [e.kind for e in coarse.entries["e+"][1]]
    assert kinds == ["aks"] * len(g["e+"])


def test_collapse_rejects_split_groups():
    reg, d = fine_quadric_registry(2, count=20, seed=0)
    bad = dict(d.coarse_grouping)
    minus = [lab for lab, c in bad.items() if c == "e-"]
    bad[minus[0]] = "e+"
    with pytest.raises(SpectralError, match="different regions"):
        collapse(reg, bad)


def test_report_hash_stable():
    a = {"x": 1, "y": [1.5, 2]}
    assert report_hash(a) == report_hash({"y": [1.5, 2], "x": 1})
    assert report_hash(a) != report_hash({"x": 2, "y": [1.5, 2]})


# -- del Pezzo -----------------------------------------------------------------

needs_data = pytest.mark.skipif(not (DATA / "D3_registry.json").exists(), reason="del Pezzo data not generated")


@needs_data
@pytest.mark.parametrize("k, factors, regions", [(2, 5, 2), (3, 6, 3), (4, 7, 3)])
def test_del_pezzo_certificate(k, factors, regions):
    cert = del_pezzo_certificate(DATA / f"D{k}_registry.json")
    assert cert.verdict
    assert cert.evidence["table"]["field_factors"] == factors
    assert len(cert.evidence["regions"]) == regions
    assert len(cert.pairs) == regions * (regions - 1) // 2
    for p in cert.pairs:
        assert p["mu"] == pytest.approx(1.0)


@needs_data
def test_d4_spheres_split_by_witness():
    cert = del_pezzo_certificate(DATA / "D4_registry.json")
    labs = {name: lab for lab, name in cert.evidence["regions"].items()}
    s1, s2 = set(labs["S1"].split("+")), set(labs["S2"].split("+"))
    assert s1 and s2 and not s1 & s2


def _copy_registry(tmp_path, k, edit):
    data = json.loads((DATA / f"D{k}_registry.json").read_text())
    edit(data)
    shutil.copy(DATA / data["table"], tmp_path / data["table"])
    path = tmp_path / f"D{k}_registry.json"
    path.write_text(json.dumps(data))
    return path


@needs_data
def test_registry_overlap_rejected(tmp_path):
    def drop_witness(data):
        for ent in data["entries"]:
            ent.pop("witness_class", None)

    # without witnesses both D4 spheres claim the whole -3 eigenspace
    path = _copy_registry(tmp_path, 4, drop_witness)
    with pytest.raises(OverlapError):
        del_pezzo_certificate(path)


@needs_data
def test_registry_needs_disjointness_citation(tmp_path):
    path = _copy_registry(tmp_path, 3, lambda d: d.update(disjoint_citation=""))
    with pytest.raises(EvidenceError):
        del_pezzo_certificate(path)


@needs_data
def test_registry_unknown_eigenvalue(tmp_path):
    path = _copy_registry(tmp_path, 2, lambda d: d["entries"][0].update(c1_eigenvalue=[11.0, 0.0]))
    with pytest.raises(SpectralError, match="no idempotent"):
        del_pezzo_certificate(path)


def test_eigenvalue_entries_need_table(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"entries": [{"region": "L", "c1_eigenvalue": [0, 0], "evidence": {"kind": "citation", "citation": "x"}}]}))
    with pytest.raises(SpectralError):
        load_registry(path)
    reg = load_registry(path, builtin_quadric_table(2))
    assert len(reg.labels()[0].split("+")) == 2
