import pytest

from radardepth.scene.dataset import DepthDataset, generate_dataset


@pytest.fixture(scope="session")
def tiny_dataset_dir(tmp_path_factory):
    """A small, fully generated dataset shared across tests."""
    root = tmp_path_factory.mktemp("tiny_ds")
    generate_dataset(root, n_scenes=2, samples_per_scene=3, image_size=(32, 32), seed=123)
    return root


@pytest.fixture(scope="session")
def tiny_dataset(tiny_dataset_dir):
    return DepthDataset(tiny_dataset_dir)
