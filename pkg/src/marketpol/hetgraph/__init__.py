from .augment import AugmentReport, augment_coreview
from .degrees import degree_distribution
from .kcore import k_core
from .labels import LabelStore, PoliticalClass, PoliticalLabel, Provenance
from .model import (
    CO_PURCHASE_KINDS,
    PRODUCT_PRODUCT_KINDS,
    EdgeKind,
    HeteroGraph,
    NodeKind,
    ReviewEdgeAttrs,
)
from .snapshot import snapshot_load, snapshot_save
from .export import export_edge_list, export_node_table

__all__ = [
    "AugmentReport",
    "augment_coreview",
    "degree_distribution",
    "k_core",
    "LabelStore",
    "PoliticalClass",
    "PoliticalLabel",
    "Provenance",
    "CO_PURCHASE_KINDS",
    "PRODUCT_PRODUCT_KINDS",
    "EdgeKind",
    "HeteroGraph",
    "NodeKind",
    "ReviewEdgeAttrs",
    "snapshot_load",
    "snapshot_save",
    "export_edge_list",
    "export_node_table",
]
