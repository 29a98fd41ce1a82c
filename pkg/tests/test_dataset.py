import numpy as np
import pytest

from coxmic import SurvivalDataset, destandardize, load_csv, recode_column, standardize
from coxmic.errors import (ConfigError, DataError, DegenerateColumnError,
                           ValidationError)

from conftest import DATA, PBC_RECODES


def test_pbc_ingestion_counts(pbc):
    assert pbc.n == 276
    assert pbc.p == 17
    assert pbc.n_events == 111
    assert not pbc.standardized


def test_pbc_first_row_raw_values(pbc):
    # subject id=1 survives listwise deletion with its raw values
    j = dict((name, k) for k, name in enumerate(pbc.names))
    assert pbc.time[0] == 400.0
    assert pbc.status[0] == 1.0
    assert pbc.covariates[0, j["bili"]] == 14.5
    assert pbc.covariates[0, j["protime"]] == 12.2
    assert pbc.covariates[0, j["stage"]] == 4.0
    assert abs(pbc.covariates[0, j["age"]] - 58.76523) < 5e-6
    assert pbc.covariates[0, j["sex"]] == 1.0  # f -> 1


def test_pbc_column_order_preserved(pbc):
    assert pbc.names == ("trt", "age", "sex", "ascites", "hepato", "spiders",
                         "edema", "bili", "chol", "albumin", "copper",
                         "alk.phos", "ast", "trig", "platelet", "protime",
                         "stage")


def test_listwise_deletion(tmp_path):
    f = tmp_path / "toy.csv"
    f.write_text("time,status,x\n1,1,0.5\n2,0,\n3,1,1.5\n")
    ds = load_csv(f)
    assert ds.n == 2
    assert list(ds.time) == [1.0, 3.0]


def test_missing_column_is_config_error(tmp_path):
    f = tmp_path / "toy.csv"
    f.write_text("time,status,x\n1,1,0.5\n")
    with pytest.raises(ConfigError):
        load_csv(f, time_col="zeit")


def test_empty_after_deletion(tmp_path):
    f = tmp_path / "toy.csv"
    f.write_text("time,status,x\n1,1,\n2,0,\n")
    with pytest.raises(DataError):
        load_csv(f)


def test_nonpositive_time_names_row(tmp_path):
    f = tmp_path / "toy.csv"
    f.write_text("time,status,x\n1,1,0.5\n0,1,0.2\n")
    with pytest.raises(ValidationError, match="row"):
        load_csv(f)


def test_recode_status_and_sex(tmp_path):
    f = tmp_path / "toy.csv"
    f.write_text("time,status,sex,x\n1,2,f,0.1\n2,0,m,0.2\n3,1,f,0.3\n")
    ds = load_csv(f, recodes={"status": {"2": 1, "*": 0}, "sex": {"f": 1, "*": 0}})
    assert list(ds.status) == [1.0, 0.0, 0.0]
    j = ds.names.index("sex")
    assert list(ds.covariates[:, j]) == [1.0, 0.0, 1.0]


def test_recode_identity_map():
    import pandas as pd
    frame = pd.DataFrame({"b": [0, 1, 1, 0]})
    out = recode_column(frame, "b", {"0": 0, "1": 1})
    assert list(out["b"]) == [0, 1, 1, 0]


def test_recode_unmapped_value_raises():
    import pandas as pd
    frame = pd.DataFrame({"b": [0, 1, 7]})
    with pytest.raises(ValidationError, match="7"):
        recode_column(frame, "b", {"0": 0, "1": 1})


def test_standardize_simple_column():
    ds = SurvivalDataset(time=[1, 2, 3], status=[1, 1, 0],
                         covariates=[[1.0], [2.0], [3.0]], names=("x",))
    out = standardize(ds)
    assert np.allclose(out.covariates[:, 0], [-1.0, 0.0, 1.0])
    assert out.centers[0] == 2.0 and out.scales[0] == 1.0


def test_standardize_invariants(pbc_std):
    means = pbc_std.covariates.mean(axis=0)
    sds = pbc_std.covariates.std(axis=0, ddof=1)
    assert np.max(np.abs(means)) < 1e-10
    assert np.max(np.abs(sds - 1.0)) < 1e-10


def test_standardize_idempotent(pbc_std):
    again = standardize(pbc_std)
    assert np.max(np.abs(again.covariates - pbc_std.covariates)) < 1e-12


def test_destandardize_round_trip(pbc, pbc_std):
    raw = destandardize(pbc_std)
    rel = np.max(np.abs(raw.covariates - pbc.covariates)
                 / (1.0 + np.abs(pbc.covariates)))
    assert rel < 1e-10


def test_constant_column_rejected():
    ds = SurvivalDataset(time=[1, 2, 3], status=[1, 0, 1],
                         covariates=[[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]],
                         names=("x", "c"))
    with pytest.raises(DegenerateColumnError, match="c"):
        standardize(ds)


def test_n_events_is_status_sum(pbc):
    assert pbc.n_events == int(pbc.status.sum())


def test_dataset_validation():
    with pytest.raises(ValidationError):
        SurvivalDataset(time=[1, -1], status=[1, 0],
                        covariates=[[0.0], [0.0]], names=("x",))
    with pytest.raises(ValidationError):
        SurvivalDataset(time=[1, 2], status=[0, 0],
                        covariates=[[0.0], [1.0]], names=("x",))
    with pytest.raises(ValidationError):
        SurvivalDataset(time=[1, 2], status=[1, 2],
                        covariates=[[0.0], [1.0]], names=("x",))


def test_dataset_is_immutable(pbc):
    with pytest.raises((ValueError, AttributeError)):
        pbc.covariates[0, 0] = 99.0


def test_recipe_file_matches_loader():
    import json
    with open("data/pbc_recipe.json") as fh:
        recipe = json.load(fh)
    recodes = {col: {k: v for k, v in m.items()}
               for col, m in recipe["recodes"].items()}
    ds = load_csv(recipe["file"], time_col=recipe["time_col"],
                  status_col=recipe["status_col"],
                  drop_cols=recipe["drop_cols"], recodes=recodes)
    assert ds.n == recipe["expected"]["n_complete"]
    assert ds.n_events == recipe["expected"]["n_events"]
    assert ds.p == recipe["expected"]["p"]
    assert recodes == PBC_RECODES
    assert recipe["file"] == DATA
