"""Run endpoints."""

from fastapi import APIRouter, Depends, HTTPException, Response, status

from csf.dependencies import get_link_builder, get_run_store
from csf.models.curve import CurveTopology, DiscreteCurve
from csf.models.responses import (
    CurveResponse,
    RegionSummary,
    RunCreate,
    RunSummary,
    SnapshotResponse,
)
from csf.services.families import FamilyParameterError, expected_loops
from csf.services.geometry import bounding_box
from csf.services.runs import RunNotFoundError, RunRecord, RunStore
from csf.services.topology import TriplePointError, analyze_topology
from csf.utils.link_builder import LinkBuilder

router = APIRouter()


def build_run_summary(record: RunRecord, link_builder: LinkBuilder) -> RunSummary:
    final = record.trajectory.final
    return RunSummary(
        id=record.id,
        family=record.family,
        solver=record.solver,
        expected_n=record.expected_n,
        outcome=record.outcome,
        stop_reason=record.trajectory.stop_reason,
        steps=record.trajectory.steps,
        final_time=final.time,
        final_box=final.box,
        snapshot_count=len(record.trajectory.snapshots),
        created_at=record.created_at,
        links=link_builder.run_links(record.id),
    )


def describe_curve(curve: DiscreteCurve) -> CurveResponse:
    """Vertices, box and topology of a curve."""
    try:
        topology: CurveTopology = analyze_topology(curve)
    except TriplePointError as e:
        raise HTTPException(status_code=422, detail=str(e)) from e
    return CurveResponse(
        vertices=curve.vertices,
        box=bounding_box(curve),
        intersections=topology.intersections,
        regions=[RegionSummary.from_region(r) for r in topology.regions],
        turning_number=topology.turning_number,
    )


@router.post("", response_model=RunSummary, status_code=status.HTTP_201_CREATED)
def create_run(
    run: RunCreate,
    store: RunStore = Depends(get_run_store),
    link_builder: LinkBuilder = Depends(get_link_builder),
) -> RunSummary:
    """Evolve a family member to its stopping time and classify it."""
    expected_n = run.expected_n or expected_loops(run.family.family)
    try:
        record = store.create_run(run.family, run.solver, expected_n, run.shrink_eps)
    except FamilyParameterError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return build_run_summary(record, link_builder)


@router.get("", response_model=list[RunSummary])
def list_runs(
    store: RunStore = Depends(get_run_store),
    link_builder: LinkBuilder = Depends(get_link_builder),
) -> list[RunSummary]:
    return [build_run_summary(r, link_builder) for r in store.list_runs()]


@router.get("/{run_id}", response_model=RunSummary)
def get_run(
    run_id: str,
    store: RunStore = Depends(get_run_store),
    link_builder: LinkBuilder = Depends(get_link_builder),
) -> RunSummary:
    try:
        return build_run_summary(store.get_run(run_id), link_builder)
    except RunNotFoundError as e:
        raise HTTPException(status_code=404, detail=str(e)) from e


@router.delete("/{run_id}", status_code=status.HTTP_204_NO_CONTENT)
def delete_run(run_id: str, store: RunStore = Depends(get_run_store)) -> Response:
    try:
        store.delete_run(run_id)
    except RunNotFoundError as e:
        raise HTTPException(status_code=404, detail=str(e)) from e
    return Response(status_code=status.HTTP_204_NO_CONTENT)


@router.get("/{run_id}/snapshots/{index}", response_model=SnapshotResponse)
def get_snapshot(
    run_id: str,
    index: int,
    store: RunStore = Depends(get_run_store),
    link_builder: LinkBuilder = Depends(get_link_builder),
) -> SnapshotResponse:
    """One recorded curve of a run with its crossings and regions."""
    try:
        record = store.get_run(run_id)
    except RunNotFoundError as e:
        raise HTTPException(status_code=404, detail=str(e)) from e
    snapshots = record.trajectory.snapshots
    if not 0 <= index < len(snapshots):
        raise HTTPException(
            status_code=404, detail=f"Run {run_id} has no snapshot {index}"
        )
    snapshot = snapshots[index]
    return SnapshotResponse(
        run_id=run_id,
        index=index,
        step=snapshot.step,
        time=snapshot.time,
        dt_used=snapshot.dt_used,
        max_K=snapshot.max_K,
        links=link_builder.snapshot_links(run_id, index),
        **dict(describe_curve(snapshot.curve)),
    )

