import pytest

from mrl import CatalogError, Reinforcer, ReinforcerCatalog, builtin_catalog, default_engine_config


def test_builtin_sizes():
    assert builtin_catalog("robot4").n == 4
    assert builtin_catalog("tetris7").n == 7


def test_unknown_name():
    with pytest.raises(CatalogError):
        builtin_catalog("bogus")


def test_ids_contiguous_and_labels_unique():
    for name in ("robot4", "tetris7"):
        cat = builtin_catalog(name)
        assert [e.id for e in cat.entries] == list(range(cat.n))
        assert len({e.label for e in cat.entries}) == cat.n


def test_catalog_validation():
    with pytest.raises(CatalogError):
        ReinforcerCatalog("solo", (Reinforcer(0, "only", "msg"),))
    with pytest.raises(CatalogError):
        ReinforcerCatalog(
            "gap", (Reinforcer(0, "a", "m"), Reinforcer(2, "b", "m"))
        )
    with pytest.raises(CatalogError):
        ReinforcerCatalog(
            "dup", (Reinforcer(0, "a", "m"), Reinforcer(1, "a", "m"))
        )


def test_default_configs_follow_catalog():
    robot = default_engine_config(builtin_catalog("robot4"), seed=1)
    assert (robot.n, robot.alpha, robot.window_k, robot.ewma_phi) == (4, 0.015, 3, 0.5)
    tetris = default_engine_config(builtin_catalog("tetris7"), seed=1)
    assert (tetris.n, tetris.alpha, tetris.window_k) == (7, 0.05, 5)
    assert tetris.ewma_phi == pytest.approx(1 / 3)


def test_default_config_overrides():
    cfg = default_engine_config(builtin_catalog("robot4"), seed=2, alpha=0.02)
    assert cfg.alpha == 0.02
