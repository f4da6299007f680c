"""Dependency injection for FastAPI."""

from csf.config import settings
from csf.services.runs import RunStore
from csf.utils.link_builder import LinkBuilder

# Singleton instances
_run_store: RunStore | None = None
_link_builder: LinkBuilder | None = None


def get_run_store() -> RunStore:
    """Get or create the RunStore singleton."""
    global _run_store
    if _run_store is None:
        _run_store = RunStore(capacity=settings.max_stored_runs)
    return _run_store


def get_link_builder() -> LinkBuilder:
    """Get or create the LinkBuilder singleton."""
    global _link_builder
    if _link_builder is None:
        _link_builder = LinkBuilder(get_run_store())
    return _link_builder
