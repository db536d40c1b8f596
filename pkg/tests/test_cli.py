"""Test per l'interfaccia a riga di comando."""

import inspect
import json

import pytest

from src import algebra, classes, encodings, laminar, logic, matroid, monoid, probe, structures, transduction, width
from src.classes import BINARY_TREES, string_structure
from src.cli import COMMANDS, GROUP_HELP, run
from src.transduction import identity, string_duplication


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("MSO_BUDGET", raising=False)


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return _write


def output(capsys):
    return json.loads(capsys.readouterr().out)


class TestParser:
    def test_every_group_has_help(self):
        assert {group for group, _ in COMMANDS} == set(GROUP_HELP)

    def test_help_and_version(self, capsys):
        assert run(["--help"]) == 0
        assert "Esempi" in capsys.readouterr().out
        assert run(["--version"]) == 0

    def test_missing_command(self):
        assert run([]) == 2
        assert run(["matroid"]) == 2

    def test_unknown_option(self):
        assert run(["enc", "list", "--nessuna"]) == 2


# operazione di libreria -> (gruppo, comando, chiamata presente nel gestore)
OPERATIONS = {
    "validate": ("struct", "validate", "structures.validate"),
    "member": ("struct", "validate", "member("),
    "is_isomorphic": ("struct", "iso", "structures.is_isomorphic"),
    "census": ("struct", "census", "census("),
    "pair": ("struct", "pair", "structures.pair"),
    "evaluate": ("logic", "eval", "logic.evaluate"),
    "free_variables": ("logic", "eval", "logic.free_variables"),
    "apply": ("trans", "apply", "transduction.apply"),
    "is_deterministic": ("trans", "apply", "transduction.is_deterministic"),
    "compose": ("trans", "compose", "transduction.compose"),
    "check_encoding": ("trans", "roundtrip", "transduction.check_encoding"),
    "rank": ("matroid", "rank", "matroid.rank"),
    "circuits": ("matroid", "circuits", "matroid.circuits"),
    "connected_components": ("matroid", "components", "matroid.connected_components"),
    "multi_connected_components": ("matroid", "components", "matroid.multi_connected_components"),
    "dual": ("matroid", "dual", "matroid.dual"),
    "delete": ("matroid", "minor", "matroid.minor"),
    "contract": ("matroid", "minor", "matroid.contract_via_dual"),
    "connectivity": ("matroid", "connectivity", "matroid.connectivity"),
    "matroid_sensitivity": ("matroid", "connectivity", "width.matroid_sensitivity"),
    "branchwidth": ("matroid", "branchwidth", "matroid.branchwidth"),
    "is_homogeneous": ("matroid", "homog", "matroid.is_homogeneous"),
    "bipartition_rank": ("width", "rank", "width.bipartition_rank"),
    "sensitivity": ("width", "sensitivity", "width.sensitivity"),
    "hyper_rankwidth": ("width", "hyperrankwidth", "width.hyper_rankwidth"),
    "compile_decomposition": ("width", "compile", "width.compile_decomposition"),
    "decode_decomposition": ("width", "decode", "width.decode_decomposition"),
    "catalog": ("enc", "list", "encodings.catalog"),
    "encode": ("enc", "run", "encodings.encode"),
    "decode": ("enc", "run", "encodings.decode"),
    "roundtrip_report": ("enc", "roundtrip", "encodings.roundtrip_report"),
    "eval_term": ("algebra", "eval-term", "algebra.eval_term"),
    "term_from_branch_decomposition": ("algebra", "compile-term", "algebra.term_from_branch_decomposition"),
    "factorization_tree": ("algebra", "factorize", "monoid.factorization_tree"),
    "idempotents": ("algebra", "factorize", "monoid.idempotents"),
    "recognizability_probe": ("algebra", "probe", "probe.recognizability_probe"),
}

# senza un formato di file per gli argomenti: solo libreria
LIBRARY_ONLY = {
    "language": "predicato su strutture, raggiunto da algebra probe tramite recognizability_probe",
    "language_compose": "prende un predicato, raggiunto da algebra probe tramite recognizability_probe",
    "independence_structure": "conversione interna delle voci enc verso i matroidi",
    "null_structure": "conversione interna, il formato d'ingresso di matroid-null-to-matrix",
    "z3_weight_assignment": "prende una funzione di scelta dei figli",
    "verify_left_right_selection": "prende due assegnazioni di pesi",
}

MODULES = (algebra, classes, encodings, laminar, logic, matroid, monoid, probe, structures, transduction, width)


class TestCoverage:
    @pytest.mark.parametrize("operation", sorted(OPERATIONS))
    def test_operation_has_a_subcommand(self, operation):
        group, name, call = OPERATIONS[operation]
        assert (group, name) in COMMANDS
        assert call in inspect.getsource(COMMANDS[(group, name)])

    def test_every_subcommand_runs_an_operation(self):
        used = {(group, name) for group, name, _ in OPERATIONS.values()}
        assert used == set(COMMANDS)

    def test_operations_exist(self):
        assert not set(OPERATIONS) & set(LIBRARY_ONLY)
        for operation in list(OPERATIONS) + list(LIBRARY_ONLY):
            assert any(callable(getattr(m, operation, None)) for m in MODULES), operation


class TestStruct:
    def test_validate(self, write, path3, capsys):
        assert run(["struct", "validate", write("a.json", path3.to_json())]) == 0
        assert output(capsys)["valid"] is True

    def test_validate_class(self, write, path3, capsys):
        path = write("a.json", path3.to_json())
        assert run(["struct", "validate", path, "--class", "graphs-edge"]) == 0
        assert output(capsys)["member"] is True
        assert run(["struct", "validate", path, "--class", "trees"]) == 1
        assert "Errore:" in capsys.readouterr().err

    def test_validate_mistyped_rows(self, write, capsys):
        doc = {
            "vocabulary": [{"name": "hyperedge", "kinds": ["set"]}],
            "universe": 2,
            "relations": {"hyperedge": [[["a"]], [[0]]]},
        }
        assert run(["struct", "validate", write("a.json", doc)]) == 1
        assert output(capsys)["violation"] == "kind mismatch"

    def test_validate_float_slot(self, write, capsys):
        doc = {
            "vocabulary": [{"name": "edge", "kinds": ["element", "element"]}],
            "universe": 2,
            "relations": {"edge": [[0, 1.5]]},
        }
        assert run(["struct", "validate", write("a.json", doc)]) == 1
        assert "Errore:" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path, capsys):
        path = tmp_path / "rotto.json"
        path.write_text("{", encoding="utf-8")
        assert run(["struct", "validate", str(path)]) == 1
        assert "Errore:" in capsys.readouterr().err

    def test_iso(self, write, path3, capsys):
        other = path3.relabel([2, 1, 0])
        assert run(["struct", "iso", write("a.json", path3.to_json()), write("b.json", other.to_json())]) == 0
        assert output(capsys)["isomorphic"] is True

    def test_census(self, capsys):
        assert run(["struct", "census", "graphs-edge", "3"]) == 0
        assert output(capsys)["count"] == 7

    def test_pretty(self, capsys):
        assert run(["struct", "census", "trees", "2", "--pretty"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("=" * 60)
        assert "mso struct census" in out


class TestLogic:
    def test_eval(self, write, path3, capsys):
        assert run(["logic", "eval", "(exists x (exists y (edge x y)))", write("a.json", path3.to_json())]) == 0
        assert output(capsys)["value"] is True

    def test_valuation(self, write, path3, capsys):
        path = write("a.json", path3.to_json())
        assert run(["logic", "eval", "(exists y (edge x y))", path, "--valuation", '{"x": 0}']) == 0
        assert output(capsys)["value"] is True

    def test_unbound(self, write, path3):
        assert run(["logic", "eval", "(exists y (edge x y))", write("a.json", path3.to_json())]) == 1

    def test_bad_valuation(self, write, path3):
        path = write("a.json", path3.to_json())
        assert run(["logic", "eval", "(exists y (edge x y))", path, "--valuation", "{x"]) == 2

    def test_budget_override(self, write, path3, capsys):
        path = write("a.json", path3.to_json())
        assert run(["logic", "eval", "(exists-set X (in x X))", path, "--valuation", '{"x": 0}',
                    "--budget", "set_quantifier=1"]) == 1
        assert "set_quantifier" in capsys.readouterr().err

    def test_bad_budget(self, write, path3):
        assert run(["logic", "eval", "(exists x (= x x))", write("a.json", path3.to_json()), "--budget", "foo=1"]) == 1


    def test_unsorted_set_slot_rejected(self, write, capsys):
        doc = {
            "vocabulary": [{"name": "hyperedge", "kinds": ["set"]}],
            "universe": 2,
            "relations": {"hyperedge": [[[1, 0]]]},
        }
        assert run(["logic", "eval", "(exists-set X (hyperedge X))", write("a.json", doc)]) == 1
        assert "unsorted set slot" in capsys.readouterr().err

    def test_id_out_of_range_rejected(self, write, capsys):
        doc = {
            "vocabulary": [{"name": "edge", "kinds": ["element", "element"]}],
            "universe": 2,
            "relations": {"edge": [[0, 5]]},
        }
        assert run(["logic", "eval", "(exists x (exists y (edge x y)))", write("a.json", doc)]) == 1
        assert "id out of range" in capsys.readouterr().err

    def test_reports_free_variables(self, write, path3, capsys):
        path = write("a.json", path3.to_json())
        assert run(["logic", "eval", "(exists y (edge x y))", path, "--valuation", '{"x": 0}']) == 0
        assert output(capsys)["free_variables"] == ["x"]

class TestTrans:
    def test_apply(self, write, capsys):
        t = write("t.json", string_duplication(2).to_json())
        A = write("a.json", string_structure([1, 0], 2).to_json())
        assert run(["trans", "apply", t, A]) == 0
        doc = output(capsys)
        assert doc["count"] == 1
        assert doc["outputs"][0]["origin"] == [0, 1, 0, 1]
        assert doc["deterministic"] is True

    def test_roundtrip(self, write, capsys):
        t = write("t.json", identity(BINARY_TREES).to_json())
        assert run(["trans", "roundtrip", t, t, "--max", "3"]) == 0
        assert output(capsys)["ok"] is True

    def test_compose(self, write, capsys):
        t = write("t.json", string_duplication(2).to_json())
        assert run(["trans", "compose", t, t]) == 0
        assert len(output(capsys)["steps"]) == 4


class TestMatroid:
    def test_rank(self, write, triangle, capsys):
        path = write("m.json", triangle.to_json())
        assert run(["matroid", "rank", path]) == 0
        assert output(capsys) == {"subset": [0, 1, 2], "rank": 2, "independent": False}
        assert run(["matroid", "rank", path, "--subset", "0,1"]) == 0
        assert output(capsys)["independent"] is True

    def test_circuits(self, write, triangle, capsys):
        assert run(["matroid", "circuits", write("m.json", triangle.to_json())]) == 0
        assert output(capsys)["circuits"] == [[0, 1, 2]]

    def test_branchwidth(self, write, triangle, capsys):
        assert run(["matroid", "branchwidth", write("m.json", triangle.to_json()), "--dot"]) == 0
        doc = output(capsys)
        assert doc["width"] == 1
        assert "dot" in doc

    def test_components_of_multi_matroid(self, write, triangle, capsys):
        path = write("mm.json", {"members": [triangle.to_json(), triangle.to_json()]})
        assert run(["matroid", "components", path]) == 0
        doc = output(capsys)
        assert doc["method"] == "multi"
        assert doc["components"] == [[0, 1, 2]]

    def test_contract_method_rejects_delete(self, write, triangle):
        path = write("m.json", triangle.to_json())
        assert run(["matroid", "minor", path, "--method", "dual", "--delete", "0"]) == 2


class TestWidth:
    def test_hyperrankwidth(self, write, capsys):
        path = write("g.json", {"n": 4, "edges": [[0, 1], [2, 3]]})
        assert run(["width", "hyperrankwidth", path]) == 0
        assert output(capsys)["width"] == 2

    def test_compile_and_decode(self, write, capsys):
        G = {"n": 3, "edges": [[0, 1], [1, 2]]}
        assert run(["width", "compile", write("g.json", G)]) == 0
        compiled = write("s.json", output(capsys))
        assert run(["width", "decode", compiled]) == 0
        assert output(capsys) == G


class TestEnc:
    def test_list(self, capsys):
        assert run(["enc", "list"]) == 0
        assert len(output(capsys)["entries"]) == 12

    def test_run(self, write, capsys):
        A = write("a.json", string_structure([2], 4).to_json())
        assert run(["enc", "run", "--id", "strings-4-to-2", "--in", A]) == 0
        B = write("b.json", output(capsys))
        assert run(["enc", "run", "--id", "strings-4-to-2", "--in", B, "--decode"]) == 0
        assert output(capsys) == json.loads(json.dumps(string_structure([2], 4).to_json()))

    def test_images_need_seed(self, write):
        A = write("a.json", string_structure([2], 4).to_json())
        assert run(["enc", "run", "--id", "strings-4-to-2", "--in", A, "--images", "2"]) == 2

    def test_roundtrip(self, capsys):
        assert run(["enc", "roundtrip", "--id", "laminar", "--max", "3"]) == 0
        doc = output(capsys)
        assert doc["ok"] is True
        assert doc["id"] == "laminar-to-tree"


class TestAlgebra:
    def test_factorize(self, write, capsys):
        h = write("z2.json", {"monoid": {"table": [[0, 1], [1, 0]], "unit": 0}, "letters": [1]})
        assert run(["algebra", "factorize", h, "--word", "aaa"]) == 0
        doc = output(capsys)
        assert doc["height"] == 2
        assert doc["valid"] is True
        assert doc["bound"] == 6
        assert doc["idempotents"] == [0]

    def test_compile_term(self, write, triangle, capsys):
        assert run(["algebra", "compile-term", write("m.json", triangle.to_json()), "--check"]) == 0
        doc = output(capsys)
        assert doc["reproduces"] is True
        term = write("term.json", doc["term"])
        assert run(["algebra", "eval-term", term]) == 0
        assert output(capsys)["sort"] == 0

    def test_probe(self, write, capsys):
        t = write("t.json", identity(BINARY_TREES).to_json())
        assert run(["algebra", "probe", t, "--sentence", "(exists x (= x x))", "--max", "3"]) == 0
        assert output(capsys)["agrees"] is True
