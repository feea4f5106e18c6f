import os
import subprocess
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
BRIDGE_ROOT = os.path.dirname(HERE)
REPO = os.path.dirname(BRIDGE_ROOT)
PLUGIN_DIR = os.path.join(REPO, "plugins", "hello")
PLUGIN_SO = os.path.join(PLUGIN_DIR, "libhello.so")

sys.path.insert(0, os.path.join(BRIDGE_ROOT, "src"))


@pytest.fixture(scope="session")
def hello_so():
    """The same plugin binary the primary suite exercises."""
    src = os.path.join(PLUGIN_DIR, "hello.c")
    if (not os.path.exists(PLUGIN_SO)
            or os.path.getmtime(PLUGIN_SO) < os.path.getmtime(src)):
        subprocess.run(
            ["cc", "-O2", "-Wall", "-shared", "-fPIC",
             "-o", PLUGIN_SO, src],
            check=True)
    return PLUGIN_SO


@pytest.fixture
def hello(hello_so, monkeypatch):
    import svarbridge
    monkeypatch.setenv("SVAR_MODULE_PATH", PLUGIN_DIR)
    return svarbridge.load("hello")
