"""Link builder for navigating runs and their snapshots."""

from csf.models.links import Link
from csf.services.runs import RunRecord, RunStore


class LinkBuilder:
    """Builds navigation links for stored runs."""

    def __init__(self, store: RunStore) -> None:
        """Initialize link builder with the run store."""
        self.store = store

    def run_links(self, run_id: str) -> dict[str, Link]:
        """Links from a run to itself and its first and last snapshots."""
        record = self.store.get_run(run_id)
        last = len(record.trajectory.snapshots) - 1
        return {
            "self": Link(href=f"/runs/{run_id}", title=record.family.family),
            "runs": Link(href="/runs", title="All runs"),
            "first": Link(href=f"/runs/{run_id}/snapshots/0", title="Initial curve"),
            "last": Link(href=f"/runs/{run_id}/snapshots/{last}", title="Final curve"),
        }

    def snapshot_links(self, run_id: str, index: int) -> dict[str, Link]:
        """Compute links from a snapshot to its run and neighbours.

        Args:
            run_id: ID of the run
            index: position of the snapshot in the trajectory

        Returns:
            Dictionary of link relation names to Link objects
        """
        record: RunRecord = self.store.get_run(run_id)
        snapshots = record.trajectory.snapshots
        links = {
            "self": Link(href=f"/runs/{run_id}/snapshots/{index}", title=None),
            "run": Link(href=f"/runs/{run_id}", title=record.family.family),
        }
        if index > 0:
            links["previous"] = Link(
                href=f"/runs/{run_id}/snapshots/{index - 1}",
                title=f"t = {snapshots[index - 1].time:.6g}",
            )
        if index < len(snapshots) - 1:
            links["next"] = Link(
                href=f"/runs/{run_id}/snapshots/{index + 1}",
                title=f"t = {snapshots[index + 1].time:.6g}",
            )
        return links
