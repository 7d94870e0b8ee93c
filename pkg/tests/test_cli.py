import json

import pytest

from src.algebra import TimePoly
from src.corpus import named_curves, named_points, shifted_vacuum
from src.psido import PsiDO
from src.report import SCHEMA_VERSION, digest
from tests.helpers import run_cli, s


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data) if not isinstance(data, str) else data)
        return str(path)

    return _write


def test_tau_of_the_vacuum(write):
    code, out = run_cli(["tau", "--point", write("v.json", named_points()["vacuum2"].to_json())])
    assert code == 0
    assert out["exit_code"] == 0
    assert out["tau"]["text"] == "1"


def test_reports_carry_digests_and_timing(write):
    data = named_points()["rank_one"].to_json()
    point = write("r.json", data)
    code, out = run_cli(["tau", "--point", point, "--miwa", write("t.json", [[3], [5]])])
    assert code == 0
    assert out["schema_version"] == SCHEMA_VERSION
    assert out["input_digests"][point] == digest(data)
    assert len(out["input_digests"]) == 2
    assert out["timing"]["seconds"] >= 0
    again = run_cli(["tau", "--point", write("copy.json", data)])[1]
    assert list(again["input_digests"].values()) == [digest(data)]


def test_tau_at_miwa_point(write):
    point = write("r.json", named_points()["rank_one"].to_json())
    code, out = run_cli(["tau", "--point", point, "--miwa", write("t.json", [[3], [5]])])
    assert code == 0
    assert out["tau"] == "-6"


def test_malformed_json_exits_2(write):
    path = write("bad.json", "{not json")
    code, out = run_cli(["tau", "--point", path])
    assert code == 2
    assert out["error"] == "schema"
    assert out["location"] == path


def test_missing_file_exits_2(tmp_path):
    code, out = run_cli(["ba", "--point", str(tmp_path / "nowhere.json")])
    assert code == 2
    assert out["error"] == "schema"


def test_bad_arguments_exit_2():
    assert run_cli(["frobnicate"])[0] == 2
    assert run_cli(["ba", "--adjoint", "--matrix", "--point", "x"])[0] == 2


def test_help_exits_0():
    assert run_cli(["--help"])[0] == 0


def test_index_nonzero_tau_exits_3(write):
    code, out = run_cli(["tau", "--point", write("sv.json", shifted_vacuum(1, 1).to_json())])
    assert code == 3
    assert out["error"] == "DomainError"


def test_ba_of_rank_one(write):
    code, out = run_cli(["ba", "--point", write("r.json", named_points()["rank_one"].to_json()), "--degree", "2"])
    assert code == 0
    assert out["wave"]["shape"] == [1]
    assert out["wave"]["exp_sign"] == 1


def test_bilinear_verdicts(write):
    pts = named_points()
    u, clash = write("u.json", pts["rank_one"].to_json()), write("c.json", pts["rank_one_clash"].to_json())
    assert run_cli(["bilinear", "--u", u, "--uprime", u])[0] == 0
    code, out = run_cli(["bilinear", "--u", u, "--uprime", clash])
    assert code == 3
    assert out["exit_code"] == 3


def test_pdo_invert_and_compose(write):
    D = 3
    op = PsiDO(1, {0: [[TimePoly.const(1, D)]], -1: [[s(1, D=D)]]})
    path = write("op.json", op.to_json())
    code, out = run_cli(["pdo", "invert", "--op", path, "--degree", str(D)])
    assert code == 0
    inverse = PsiDO.from_json(out["operator"], D)
    assert inverse.order == 0
    assert run_cli(["pdo", "compose", "--op", path, "--degree", str(D)])[0] == 2


def test_nkp_actions(write):
    point = write("p2.json", named_points()["p2"].to_json())
    for action, degree in (("check", "4"), ("sato", "4"), ("djkm", "3")):
        code, out = run_cli(["nkp", action, "--point", point, "--degree", degree, "--floor", "-3"])
        assert code == 0, out


def test_wronskian(write):
    code, out = run_cli(["wronskian", "--point", write("p2.json", named_points()["p2"].to_json())])
    assert code == 0
    assert out["wronskian"]["holds"]


def test_krichever(write):
    curve = write("c.json", named_curves()["zero_infinity"].to_json())
    code, out = run_cli(["krichever", "--curve", curve, "--lo", "-6", "--hi", "7", "--degree", "2"])
    assert code == 0
    assert out["index"] == {"A": 1, "B": 1, "expected_B": 1}
    assert out["moduli_equations"]["details"]["agree"]


def test_krichever_small_window_exits_3(write):
    curve = write("c.json", named_curves()["zero_infinity"].to_json())
    code, out = run_cli(["krichever", "--curve", curve, "--lo", "-2", "--hi", "1"])
    assert code == 3
    assert out["quantity"] == "window"


def test_corpus_subset():
    code, out = run_cli(["corpus", "--only", "vacuum"])
    assert code == 0
    assert list(out["corpus"]["details"]) == ["vacuum"]
