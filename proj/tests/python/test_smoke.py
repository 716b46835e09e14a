import json
import os
import pathlib

import pytest

import sqltpl

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="module")
def catalogs():
    return sqltpl.load_catalogs(FIXTURES / "paper_catalogs.json")


def test_templatize_running_example(catalogs):
    out = sqltpl.templatize(
        "SELECT name FROM employees WHERE salary > 50000", catalogs["company"]
    )
    assert out["hard"]["template"] == "SELECT col_name FROM table_name WHERE col_name > num"
    assert out["soft"]["template"] == "SELECT variable FROM variable WHERE variable > num"


def test_profile_and_lex(catalogs):
    cat = next(iter(catalogs.values()))
    p = sqltpl.profile("SELECT COUNT(*) FROM t", cat)
    assert set(p) == {
        "num_tables", "num_joins", "num_subqueries", "max_nesting_depth",
        "num_aggs_plus_group_by", "advanced_feature_count",
    }
    assert p["num_aggs_plus_group_by"] == 1
    kinds = [k for k, _ in sqltpl.lex("SELECT 1")]
    assert len(kinds) == 2


def test_errors_raise(catalogs):
    with pytest.raises(sqltpl.SqltplError):
        sqltpl.lex("SELECT 'open")
    with pytest.raises(sqltpl.SqltplError):
        sqltpl.spearman([1, 2, 3], [1, 2, 3])


def test_ingest_and_match(tmp_path, catalogs):
    res = sqltpl.ingest(FIXTURES / "tiny_records.jsonl", FIXTURES / "paper_catalogs.json")
    assert res.records_read == 5
    assert res.hard.total_queries + len(res.failures) == 5
    assert len(res.soft) <= len(res.hard)
    top, count = res.soft.ranked()[0]
    assert res.soft.count(top) == count

    path = tmp_path / "soft.json"
    res.soft.save(path)
    again = sqltpl.Inventory.load(path)
    assert again == res.soft
    assert json.loads(again.to_json())["level"] == "SOFT"


def test_statistics():
    counts = [120, 40, 12, 5, 3, 2, 1, 1, 1, 1]
    spec = sqltpl.spectrum(counts)
    assert spec["total_queries"] == sum(counts)
    assert spec["groups"]["Once"]["templates"] == 4
    rows = sqltpl.coverage(counts, [50, 100])
    assert rows[0]["templates_needed"] == 1
    assert rows[1]["templates_needed"] == len(counts)

    xs = [float(r) for r in range(1, 50)]
    ys = [1000.0 * r ** -0.8 for r in xs]
    fit = sqltpl.fit_points(xs, ys)
    assert abs(fit["alpha"] - 0.8) < 1e-9

    rho, p = sqltpl.spearman([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert rho == 1.0 and p == 0.0


def test_gof_is_seeded():
    data = sqltpl.sample_power_law(2.5, 1, 2000, 11)
    a = sqltpl.gof(data, resamples=100, seed=3)
    b = sqltpl.gof(data, resamples=100, seed=3)
    assert a == b
    assert 0.0 <= a["p_value"] <= 1.0
    with pytest.raises(sqltpl.SqltplError):
        sqltpl.gof(data, resamples=10)


def test_run_cli(catalogs):
    code, out, err = sqltpl.run_cli([
        "templatize", "--catalog", str(FIXTURES / "paper_catalogs.json"),
        "--db", "company", "SELECT name FROM employees",
    ])
    assert code == 0
    assert out.splitlines()[0] == "SELECT col_name FROM table_name"
    code, _, _ = sqltpl.run_cli(["no-such-command"])
    assert code == 1
