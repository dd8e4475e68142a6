from __future__ import annotations

import pytest


@pytest.fixture(autouse=True)
def _clear_build_info_caches(monkeypatch: pytest.MonkeyPatch):
    """Ensure build_info cache + env are clean for each test."""

    from orthofit import build_info

    for k in ("ORTHOFIT_REVISION", "GIT_COMMIT", "GITHUB_SHA", "CI_COMMIT_SHA"):
        monkeypatch.delenv(k, raising=False)

    build_info.get_revision_full.cache_clear()
    yield
    build_info.get_revision_full.cache_clear()


def test_get_revision_unknown_without_sources(monkeypatch: pytest.MonkeyPatch):
    from orthofit import build_info

    monkeypatch.setattr(build_info, "_find_git_root", lambda *_a, **_k: None)
    build_info.get_revision_full.cache_clear()

    assert build_info.get_revision() == "unknown"


def test_get_revision_env_override(monkeypatch: pytest.MonkeyPatch):
    from orthofit import build_info

    monkeypatch.setenv("ORTHOFIT_REVISION", "1234567890abcdef")
    build_info.get_revision_full.cache_clear()

    assert build_info.get_revision(short=True) == "1234567"
    assert build_info.get_revision(short=False) == "1234567890abcdef"


def test_ci_env_keys_are_a_fallback(monkeypatch: pytest.MonkeyPatch):
    from orthofit import build_info

    monkeypatch.setenv("GITHUB_SHA", "feedface00000000")
    build_info.get_revision_full.cache_clear()
    assert build_info.get_revision() == "feedfac"

    monkeypatch.setenv("ORTHOFIT_REVISION", "0123456789")
    build_info.get_revision_full.cache_clear()
    assert build_info.get_revision() == "0123456"


def test_get_version_with_revision_appends_short_hash(monkeypatch: pytest.MonkeyPatch):
    import orthofit
    from orthofit import build_info

    monkeypatch.setattr(orthofit, "__version__", "1.2.3")
    monkeypatch.setenv("ORTHOFIT_REVISION", "deadbeefcafebabe")
    build_info.get_revision_full.cache_clear()

    assert build_info.get_version_with_revision() == "1.2.3+gdeadbee"


def test_get_version_with_revision_without_hash(monkeypatch: pytest.MonkeyPatch):
    import orthofit
    from orthofit import build_info

    monkeypatch.setattr(orthofit, "__version__", "1.2.3")
    monkeypatch.setattr(build_info, "_find_git_root", lambda *_a, **_k: None)
    build_info.get_revision_full.cache_clear()

    assert build_info.get_version_with_revision() == "1.2.3"


def test_find_git_root_walks_up(tmp_path):
    from orthofit import build_info

    (tmp_path / ".git").mkdir()
    leaf = tmp_path / "a" / "b"
    leaf.mkdir(parents=True)
    (leaf / "f.py").write_text("", encoding="utf-8")

    assert build_info._find_git_root(leaf / "f.py") == tmp_path.resolve()
    assert build_info._find_git_root(leaf, max_hops=1) is None


def test_build_record_fields(monkeypatch: pytest.MonkeyPatch):
    from orthofit import build_info

    monkeypatch.setenv("ORTHOFIT_REVISION", "abcdef123456")
    build_info.get_revision_full.cache_clear()

    rec = build_info.build_record("lab-7")
    assert rec["revision"] == "abcdef123456"
    assert rec["build_tag"] == "lab-7"
    assert "build_tag" not in build_info.build_record("  ")
