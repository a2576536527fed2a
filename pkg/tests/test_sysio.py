import json

import numpy as np
import pytest

from mdsolve.assembly import PhysicalParams, assemble
from mdsolve.grids import build_cross_2d, build_random_network_2d
from mdsolve.sysio import SIDECAR_NAME, export_system, import_system


@pytest.mark.parametrize(
    "grid,params",
    [
        (build_cross_2d(2), PhysicalParams()),
        (build_cross_2d(4), PhysicalParams(k_parallel=1e4, kappa=1e-4)),
        (build_random_network_2d(8, 4, seed=5), PhysicalParams(kappa=123.456)),
        (build_random_network_2d(4, 0), PhysicalParams()),  # no interfaces at all
    ],
    ids=["cross2", "cross4-contrast", "random", "fracture-free"],
)
def test_roundtrip_is_entrywise_identical(tmp_path, grid, params):
    original = assemble(grid, params)
    export_system(original, tmp_path)
    back = import_system(tmp_path)
    assert back.a_omega_omega == original.a_omega_omega
    assert back.a_omega_gamma == original.a_omega_gamma
    assert back.a_gamma_omega == original.a_gamma_omega
    assert back.a_gamma_gamma == original.a_gamma_gamma
    assert np.array_equal(back.rhs_omega, original.rhs_omega)
    assert np.array_equal(back.rhs_gamma, original.rhs_gamma)
    assert back.partition == original.partition


def test_corrupt_partition_sum_is_named(tmp_path):
    export_system(assemble(build_cross_2d(2), PhysicalParams()), tmp_path)
    sidecar = json.loads((tmp_path / SIDECAR_NAME).read_text())
    sidecar["omega_ranges"][0][2] -= 1  # shrink the matrix range
    (tmp_path / SIDECAR_NAME).write_text(json.dumps(sidecar))
    with pytest.raises(ValueError, match="omega ranges sum"):
        import_system(tmp_path)


def test_gamma_partition_mismatch_is_named(tmp_path):
    export_system(assemble(build_cross_2d(2), PhysicalParams()), tmp_path)
    sidecar = json.loads((tmp_path / SIDECAR_NAME).read_text())
    sidecar["n_gamma"] += 2
    (tmp_path / SIDECAR_NAME).write_text(json.dumps(sidecar))
    with pytest.raises(ValueError, match="gamma ranges sum"):
        import_system(tmp_path)


def test_transpose_violation_is_rejected(tmp_path):
    export_system(assemble(build_cross_2d(2), PhysicalParams()), tmp_path)
    target = tmp_path / "a_gamma_omega.mtx"
    lines = target.read_text().splitlines()
    dims_at = next(i for i, l in enumerate(lines) if not l.startswith("%"))
    entry = lines[dims_at + 1].split()  # first stored coupling entry
    entry[2] = repr(-float(entry[2]))
    lines[dims_at + 1] = " ".join(entry)
    target.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="transpose"):
        import_system(tmp_path)


def test_missing_sidecar(tmp_path):
    with pytest.raises(ValueError, match="sidecar"):
        import_system(tmp_path)


def test_wrong_format_tag(tmp_path):
    export_system(assemble(build_cross_2d(2), PhysicalParams()), tmp_path)
    sidecar = json.loads((tmp_path / SIDECAR_NAME).read_text())
    sidecar["format"] = "something-else"
    (tmp_path / SIDECAR_NAME).write_text(json.dumps(sidecar))
    with pytest.raises(ValueError, match="format"):
        import_system(tmp_path)
