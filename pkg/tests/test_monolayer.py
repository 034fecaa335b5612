import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honeystab.lattice import LatticeModel, bond_sum
from honeystab.monolayer import (DELTA_MIN, K_POINT, MonolayerParams, ReferenceBands,
                                 ReferenceFormatError, band_comparison, high_symmetry_path,
                                 load_reference_csv, m_point, model_overlaps,
                                 params_from_band_data, path_gap, reference_from_model,
                                 theta_from_gap_form, theta_from_overlap_ratio, theta_routes,
                                 write_reference_csv)
from honeystab.stabilizer import boosted_couplings, rotated_couplings


def test_params_from_band_data_values():
    delta, mu = params_from_band_data(1.79, 3.25)
    assert mu == 0.895
    assert delta == np.sqrt(1.625 ** 2 - 0.895 ** 2)
    assert params_from_band_data(1.90, 3.25)[1] == 0.95


@pytest.mark.parametrize("gap,bw", [(0.0, 1.0), (2.0, 1.0), (1.0, 1.0), (-1.0, 2.0)])
def test_params_reject_nonphysical(gap, bw):
    with pytest.raises(ValueError):
        params_from_band_data(gap, bw)


def test_params_reject_flat_band():
    with pytest.raises(ValueError):
        params_from_band_data(3.25 * (1 - 1e-15), 3.25)
    delta, _ = params_from_band_data(1.0, 1.0 + 1e-10)
    assert delta >= DELTA_MIN


def test_overlap_ratio_examples():
    assert theta_from_overlap_ratio(1.0, 0.0) == 0.0
    assert np.isclose(theta_from_overlap_ratio(0.7, 0.7), np.pi / 2)
    with pytest.raises(ValueError):
        theta_from_overlap_ratio(0.0, 1.0)
    with pytest.raises(ValueError):
        theta_from_overlap_ratio(1.0, -0.1)


def test_gap_form_examples():
    root = np.sqrt(3.25 ** 2 - 1.79 ** 2)
    assert np.isclose(theta_from_gap_form(root / 4, 1.79, 3.25), np.pi / 2)
    assert theta_from_gap_form(root / 2, 1.79, 3.25) == 0.0
    assert np.isclose(theta_from_gap_form(0.9, 1.79, 3.25), np.arccos(3.6 / root - 1))
    with pytest.raises(ValueError):
        theta_from_gap_form(root, 1.79, 3.25)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.1, 2.0), st.floats(0.5, 1.5))
def test_theta_routes_agree_on_model_inputs(theta, mu, bw_scale):
    e_gap = 2 * mu
    e_bw = e_gap + bw_scale
    delta, _ = params_from_band_data(e_gap, e_bw)
    t1, t2 = model_overlaps(delta, theta)
    routes = theta_routes(t1, t2, e_gap, e_bw)
    assert routes["disagreement"] < 1e-10
    assert abs(routes["overlap_ratio"] - theta) < 1e-10


def test_model_overlaps_match_rotated_table():
    delta, theta = 1.3, 0.7
    tm = rotated_couplings(LatticeModel("honeycomb", delta, 0.4), theta)
    t1, t2 = model_overlaps(delta, theta)
    assert np.isclose(max(abs(h.amplitude) for h in tm.couplings.by_order(2)), t2)
    assert any(np.isclose(abs(h.amplitude), t1) for h in tm.couplings.by_order(1))


def test_monolayer_params():
    p = MonolayerParams(1.79, 3.25, t1=1.0, t2=1.0)
    assert p.mu == 0.895 and np.isclose(p.theta, np.pi / 2)
    assert MonolayerParams(1.79, 3.25).theta is None
    with pytest.raises(ValueError):
        MonolayerParams(3.0, 2.0)
    assert np.isclose(p.model().mu, 0.895)


def test_path_endpoints_and_points():
    path = high_symmetry_path(20)
    assert np.allclose(path.k[0], 0) and np.allclose(path.k[-1], 0)
    assert path.s[0] == 0 and path.s[-1] == 1 and np.all(np.diff(path.s) > 0)
    assert path.labels[0] == "G" and path.labels[20] == "M" and path.labels[40] == "K"
    assert abs(bond_sum(path.k[40])) < 1e-12
    assert np.array_equal(path.k[40], K_POINT)
    assert np.isclose(abs(bond_sum(m_point())), 1.0)
    with pytest.raises(ValueError):
        high_symmetry_path(1)


def test_m_point_is_zone_edge_midpoint():
    m = m_point()
    assert np.allclose(m, [np.pi / np.sqrt(3), np.pi / 3])
    # brute force: every other reciprocal vector is at least as far from M as Gamma is
    from honeystab.lattice import reciprocal_vectors
    g1, g2 = reciprocal_vectors()
    for i in range(-2, 3):
        for j in range(-2, 3):
            g = i * g1 + j * g2
            assert np.linalg.norm(m - g) >= np.linalg.norm(m) - 1e-12


def test_gap_location_is_k():
    model = LatticeModel("honeycomb", *params_from_band_data(1.79, 3.25))
    gap, k = path_gap(model, high_symmetry_path(60))
    assert np.allclose(k, K_POINT) and abs(gap - 1.79) < 1e-9


def test_self_comparison_is_exact():
    model = LatticeModel("honeycomb", 1.2, 0.6)
    ref = reference_from_model(model, high_symmetry_path(30))
    report = band_comparison(model, ref)
    assert report["rms_ev"] == {"upper": 0.0, "lower": 0.0}
    assert report["max_abs_ev"] == 0.0 and report["n_excluded"] == 0


def test_offset_reference():
    model = LatticeModel("honeycomb", 1.2, 0.6)
    ref = reference_from_model(model, high_symmetry_path(30), {"upper": 0.1})
    report = band_comparison(model, ref)
    assert np.isclose(report["max_abs_ev"], 0.1) and report["rms_ev"]["lower"] == 0.0
    assert np.isclose(report["gap_at_K_discrepancy_ev"], -0.1)


def test_energy_zero_fit_removes_common_shift():
    model = LatticeModel("honeycomb", 1.2, 0.6)
    ref = reference_from_model(model, high_symmetry_path(30), {"upper": 0.25, "lower": 0.25})
    assert np.isclose(band_comparison(model, ref)["max_abs_ev"], 0.25)
    fitted = band_comparison(model, ref, fit_energy_zero=True)
    assert fitted["max_abs_ev"] < 1e-12 and np.isclose(fitted["energy_zero_shift_ev"], 0.25)


def test_closed_loop_gap_at_k():
    delta, mu = params_from_band_data(1.79, 3.25)
    model = LatticeModel("honeycomb", delta, mu)
    report = band_comparison(model, reference_from_model(model, high_symmetry_path(40)))
    assert abs(report["gap_at_K_ev"] - 1.79) < 1e-9


def test_window_exclusion_and_empty_window():
    model = LatticeModel("honeycomb", 1.0, 0.5)
    ref = reference_from_model(model, high_symmetry_path(10)).with_window((0.2, 0.6))
    report = band_comparison(model, ref)
    inside = np.count_nonzero((ref.s >= 0.2) & (ref.s <= 0.6))
    assert report["n_excluded"] == len(ref.s) - inside and report["window"] == [0.2, 0.6]
    empty = ref.with_window((0.001, 0.002))
    with pytest.raises(ValueError):
        band_comparison(model, empty)


@pytest.mark.parametrize("theta", [0.1, 0.9, 2.5])
def test_deformation_neutrality(theta):
    model = LatticeModel("honeycomb", 1.0, 0.4)
    ref = reference_from_model(model, high_symmetry_path(25))
    assert max(band_comparison(rotated_couplings(model, theta), ref)["rms_ev"].values()) < 1e-10
    assert max(band_comparison(boosted_couplings(model, theta / 2), ref)["rms_ev"].values()) < 1e-10


def test_reference_csv_roundtrip(tmp_path):
    model = LatticeModel("honeycomb", 1.0, 0.4)
    ref = reference_from_model(model, high_symmetry_path(8))
    path = tmp_path / "ref.csv"
    write_reference_csv(path, ref)
    back = load_reference_csv(path)
    assert np.array_equal(back.energy, ref.energy) and back.band == ref.band
    assert path.read_text().splitlines()[0] == "s,kx,ky,band,energy_ev"


@pytest.mark.parametrize("body,line", [
    ("s,kx,ky,band\n", 1),
    ("s,kx,ky,band,energy_ev\n0,0,0,upper,1\n0.1,0,0,middle,1\n", 3),
    ("s,kx,ky,band,energy_ev\n0,0,0,upper,1\n0.1,0,zero,lower,1\n", 3),
    ("s,kx,ky,band,energy_ev\n0,0,0,upper,1\n1.5,0,0,lower,1\n", 3),
    ("s,kx,ky,band,energy_ev\n0.5,0,0,upper,1\n0.2,0,0,upper,1\n0,0,0,lower,0\n", 3),
    ("s,kx,ky,band,energy_ev\n0,0,0,upper\n", 2),
])
def test_reference_schema_errors_carry_line(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ReferenceFormatError) as info:
        load_reference_csv(path)
    assert info.value.line == line


def test_reference_needs_two_bands(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("s,kx,ky,band,energy_ev\n0,0,0,upper,1\n")
    with pytest.raises(ReferenceFormatError):
        load_reference_csv(path)
    with pytest.raises(ValueError):
        ReferenceBands(np.zeros(2), np.zeros((2, 2)), np.zeros(2), ("upper", "upper"))


def test_missing_reference_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_reference_csv(tmp_path / "none.csv")
