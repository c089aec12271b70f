import json

import pytest

import canalyzing_fq
from canalyzing_fq import files, function
from canalyzing_fq.field import make_field


def _functions():
    field = make_field(3)
    return [
        function.TruthTable(field, 1, [2, 0, 1]),
        function.AnfPolynomial(field, 2, [1, 0, 0, 0, 2, 0, 0, 0, 0]),
    ]


@pytest.mark.parametrize("suffix", [".json", ".toml"])
def test_write_then_read(tmp_path, suffix):
    path = tmp_path / f"functions{suffix}"
    written = files.write_functions(path, _functions())
    assert written == path
    assert files.read_functions(path) == _functions()


def test_single_record(tmp_path):
    path = tmp_path / "one.json"
    path.write_text(json.dumps({"q": 2, "n": 2, "table": [0, 0, 0, 1]}))
    [f] = files.read_functions(path)
    assert f.tolist() == [0, 0, 0, 1]


def test_toml_anf_record(tmp_path):
    path = tmp_path / "one.toml"
    path.write_text(
        "q = 5\nn = 1\n\n"
        "[[anf]]\ncoeff = 3\nexps = [2]\n\n"
        "[[anf]]\ncoeff = 1\nexps = [0]\n"
    )
    [f] = files.read_functions(path)
    assert str(f) == "3*x1^2 + 1"


def test_refuses_to_overwrite(tmp_path):
    path = tmp_path / "functions.json"
    files.write_functions(path, _functions()[:1])
    with pytest.raises(FileExistsError):
        files.write_functions(path, _functions())
    assert len(files.read_functions(path)) == 1
    files.write_functions(path, _functions(), overwrite=True)
    assert len(files.read_functions(path)) == 2
    assert [p.name for p in tmp_path.iterdir()] == ["functions.json"]


def test_dumps_is_stable():
    text = files.dumps_functions(_functions())
    assert text == files.dumps_functions(_functions())
    assert json.loads(text)["functions"][0] == {"q": 3, "n": 1, "table": [2, 0, 1]}


@pytest.mark.parametrize(
    "name, text",
    [
        ("bad.txt", "{}"),
        ("bad.json", "{not json"),
        ("bad.json", "[1, 2]"),
        ("bad.json", '{"functions": []}'),
        ("bad.toml", "q = 2\nn = 1\ntable = [0, 2]\n"),
    ],
)
def test_malformed_files(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    with pytest.raises(canalyzing_fq.FunctionFileError):
        files.read_functions(path)


def test_missing_file(tmp_path):
    with pytest.raises(canalyzing_fq.FunctionFileError):
        files.read_functions(tmp_path / "missing.json")


def test_temp_file_is_cleaned_up(tmp_path):
    with files.make_temp_file_path(dir=tmp_path) as temp_file:
        assert temp_file.exists()
    assert not temp_file.exists()
