import os
import subprocess
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import holdall  # noqa: E402
from holdall import classes as _classes, modules as _modules  # noqa: E402

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PLUGIN_DIR = os.path.join(REPO, "plugins", "hello")
CORPUS_DIR = os.path.join(REPO, "data", "corpus")


@pytest.fixture(autouse=True)
def registry_isolation():
    """Snapshot the global class/module registries around every test."""
    with _classes._LOCK:
        by_name = dict(_classes._BY_NAME)
        by_type = dict(_classes._BY_TYPE)
    with _modules._LOCK:
        mods = dict(_modules._MODULES)
    yield
    with _classes._LOCK:
        _classes._BY_NAME.clear()
        _classes._BY_NAME.update(by_name)
        _classes._BY_TYPE.clear()
        _classes._BY_TYPE.update(by_type)
    with _modules._LOCK:
        _modules._MODULES.clear()
        _modules._MODULES.update(mods)


@pytest.fixture(scope="session")
def hello_plugin():
    """Path to the compiled sample plugin, building it if needed."""
    so = os.path.join(PLUGIN_DIR, "libhello.so")
    src = os.path.join(PLUGIN_DIR, "hello.c")
    if not os.path.exists(so) or (
            os.path.getmtime(so) < os.path.getmtime(src)):
        subprocess.run(
            ["cc", "-O2", "-Wall", "-shared", "-fPIC", "-o", so, src],
            check=True, cwd=PLUGIN_DIR)
    return so


@pytest.fixture(scope="session")
def corpus_files():
    """The three benchmark corpus files, generated when absent."""
    names = ["canada.json", "citm_catalog.json", "twitter.json"]
    paths = [os.path.join(CORPUS_DIR, n) for n in names]
    if not all(os.path.exists(p) for p in paths):
        script = os.path.join(REPO, "scripts", "make_corpus.py")
        subprocess.run([sys.executable, script, "--out-dir", CORPUS_DIR],
                       check=True)
    return paths
