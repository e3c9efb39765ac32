import json
import re

import pytest

from fstruct import arith, catalog
from fstruct.connection import characteristic_torsion
from fstruct.curvature import torsion_kernel
from fstruct.errors import ExactModeUnsupported, InvalidStructure, NotSasakian, StructureFileError
from fstruct.fstructure import classify, validate_f_structure

ALL = ["u2", "u3", "h3", "h5", "h3t3", "t3", "product:h3:4"]


def _same(A, B):
    return (A.labels == B.labels and (A.L.c == B.L.c).all() and (A.G.g == B.G.g).all()
            and (A.phi == B.phi).all() and all((x == y).all() for x, y in zip(A.xi, B.xi)))


@pytest.mark.parametrize("name", ALL)
def test_round_trip(name, tmp_path):
    M = catalog.example(name)
    path = tmp_path / "s.json"
    catalog.save_structure(M, path)
    back = catalog.load_structure(path)
    assert _same(M, back)
    assert catalog.dumps_structure(back) == path.read_text()


def test_dumps_is_deterministic():
    assert catalog.dumps_structure(catalog.example("u3")) == catalog.dumps_structure(catalog.example("u3"))


def test_unknown_example():
    with pytest.raises(KeyError, match="unknown example"):
        catalog.example("sl2")
    with pytest.raises(KeyError, match="malformed product"):
        catalog.example("product:h3:x")


def test_product_requires_sasakian_base():
    with pytest.raises(NotSasakian):
        catalog.example("product:u2:3")


@pytest.mark.parametrize("s", [1, 2, 4, 9])
def test_products_are_s_manifolds(s):
    M = catalog.example(f"product:h3:{s}") if s != 2 else None
    if M is None:
        with pytest.raises(ExactModeUnsupported):
            catalog.example("product:h3:2")
        with arith.arithmetic(arith.FLOAT):
            M = catalog.example("product:h3:2")
    assert validate_f_structure(M).ok
    assert classify(M).is_S
    assert M.s == s
    assert torsion_kernel(M, characteristic_torsion(M)).rank == s - 1


def test_h3t3_accepts_other_hadamard_and_rejects_non_hadamard():
    other = ((1, 1, 1, 1), (1, 1, -1, -1), (1, -1, 1, -1), (1, -1, -1, 1))
    assert classify(catalog.example_h3_t3(other)).is_S
    with pytest.raises(InvalidStructure):
        catalog.example_h3_t3(((1, 1, 1, 1),) * 4)


def test_householder_first_column():
    Q = catalog.householder_splitting(4)
    assert [Q[i, 0] for i in range(4)] == [arith.mpq(1, 2)] * 4
    assert (Q.T.dot(Q) == arith.identity(4)).all()


def _write(tmp_path, data):
    p = tmp_path / "s.json"
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return p


def _valid():
    return catalog.structure_to_dict(catalog.example("h3"))


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.pop("gram"), "gram"),
    (lambda d: d.update(dim=0), "dim"),
    (lambda d: d.update(labels=["a"]), "labels"),
    (lambda d: d["brackets"].append([1, 0, 2, "1"]), "brackets[1]"),
    (lambda d: d["brackets"].append([0, 1, 2, "1"]), "brackets[1]"),
    (lambda d: d["brackets"].append([0, 7, 2, "1"]), "brackets[1]"),
    (lambda d: d["gram"].append([1, 0, "1"]), "gram[3]"),
    (lambda d: d.update(phi=[[0]]), "phi"),
    (lambda d: d["xi"].append([1]), "xi[1]"),
    (lambda d: d["phi"][0].__setitem__(0, "x/y"), "phi[0][0]"),
    (lambda d: d.update(mode="fast"), "mode"),
])
def test_malformed_files_name_the_field(tmp_path, mutate, field):
    d = _valid()
    mutate(d)
    with pytest.raises(StructureFileError, match=re.escape(f"field {field}")):
        catalog.load_structure(_write(tmp_path, d))


def test_invalid_json_reports_line(tmp_path):
    with pytest.raises(StructureFileError, match="line 2"):
        catalog.load_structure(_write(tmp_path, '{\n  "dim": ,\n}'))


def test_non_object_top_level(tmp_path):
    with pytest.raises(StructureFileError):
        catalog.load_structure(_write(tmp_path, "[1, 2]"))


def test_singular_gram_rejected(tmp_path):
    d = _valid()
    d["gram"] = [[0, 0, "1"], [1, 1, "1"]]
    with pytest.raises(StructureFileError, match="field gram"):
        catalog.load_structure(_write(tmp_path, d))


def test_structure_failing_validation_loads_with_warning(tmp_path):
    d = _valid()
    d["phi"][1][0] = "2"
    with pytest.warns(UserWarning, match="fails validation"):
        M = catalog.load_structure(_write(tmp_path, d))
    assert not validate_f_structure(M).ok


def test_mode_precedence(tmp_path):
    d = _valid()
    d["mode"] = "float"
    p = _write(tmp_path, d)
    assert not catalog.load_structure(p).exact  # file hint beats the ambient exact mode
    assert catalog.load_structure(p, arith.EXACT).exact  # explicit argument beats the hint
    d.pop("mode")
    p = _write(tmp_path, d)
    assert catalog.load_structure(p).exact
    with arith.arithmetic(arith.FLOAT):
        assert not catalog.load_structure(p).exact


def test_float_literal_in_exact_mode(tmp_path):
    d = _valid()
    d["gram"][0][2] = 0.5
    with pytest.raises(ExactModeUnsupported, match="gram"):
        catalog.load_structure(_write(tmp_path, d), arith.EXACT)
    M = catalog.load_structure(_write(tmp_path, d), arith.FLOAT)
    assert M.G.g[0, 0] == 0.5
