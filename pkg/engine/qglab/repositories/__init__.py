"""Artifact persistence: JSON reports, CSV series and QGCF field snapshots."""
from .artifacts import ArtifactRepository
from .snapshot import SnapshotRepository

__all__ = ["ArtifactRepository", "SnapshotRepository"]
