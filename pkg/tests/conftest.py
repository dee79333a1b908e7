"""Shared fixtures: small seeded scenes and a toy codebook.

Session-scoped because scene rendering and k-means training dominate
suite runtime; everything they produce is deterministic, so sharing is
safe.
"""

import numpy as np
import pytest

from panosynth import codebook, scenes
from panosynth.projection import extract_nfov, standard_viewset


@pytest.fixture(scope="session")
def small_pano():
    """One 128x256 test panorama, colors in [0.05, 0.98]."""
    return scenes.render_panorama(scenes.scene_params(7), 128)


@pytest.fixture(scope="session")
def pano_512():
    return scenes.render_panorama(scenes.scene_params(42), 512)


@pytest.fixture(scope="session")
def small_views():
    return standard_viewset(60.0, 64)


@pytest.fixture(scope="session")
def small_codebook():
    """K=32, patch 8, trained on three small scenes."""
    imgs = [scenes.render_panorama(scenes.scene_params(s), 64)
            for s in range(3)]
    return codebook.train_codebook(imgs, k=32, patch=8, seed=0)


@pytest.fixture(scope="session")
def view_codebook():
    """Patch-8 codebook trained on NFoV views, for pipeline tests."""
    views = standard_viewset(60.0, 64)
    imgs = []
    for s in (11, 12):
        erp = scenes.render_panorama(scenes.scene_params(s), 128)
        imgs.extend(extract_nfov(erp, cam) for cam in views)
    return codebook.train_codebook(imgs, k=128, patch=8, seed=2)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
