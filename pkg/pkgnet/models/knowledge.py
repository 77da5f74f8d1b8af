from pydantic import BaseModel, Field, model_validator
from typing import Dict, List, Optional, Tuple, Union
from enum import Enum


class KGVariant(str, Enum):
    """Knowledge-graph ablation variants"""
    BASE = "base"
    SAME_EDGES = "same-edges"
    NO_EDGES = "no-edges"
    FULLY_CONNECTED = "fc"
    FULLY_CONNECTED_DISTINCT = "fc-distinct"
    COMPLETE = "complete"


class EditOperation(str, Enum):
    """Runtime knowledge-graph edit operations"""
    REMOVE_EDGE = "remove-edge"
    SET_EDGE_FEATURE = "set-edge-feature"
    ADD_EDGE = "add-edge"


class EdgeReference(BaseModel):
    """Copy the edge type of another edge"""
    like: Tuple[str, str] = Field(..., description="(src, dst) of the edge whose type is copied")


class KGEdit(BaseModel):
    """One edit applied to a trained agent's knowledge graph at evaluation time"""
    operation: EditOperation = Field(..., description="Edit operation")
    src: str = Field(..., description="Source vertex symbol or alias")
    dst: str = Field(..., description="Destination vertex symbol or alias")
    feature: Optional[Union[str, EdgeReference]] = Field(
        None, description="Edge-type name, or a reference to another edge's type"
    )

    @model_validator(mode="after")
    def feature_matches_operation(self) -> "KGEdit":
        if self.operation == EditOperation.REMOVE_EDGE and self.feature is not None:
            raise ValueError("remove-edge takes no feature")
        if self.operation != EditOperation.REMOVE_EDGE and self.feature is None:
            raise ValueError(f"{self.operation.value} requires a feature")
        return self


class EdgeDocument(BaseModel):
    src: str
    dst: str
    type: str


class KnowledgeGraphDocument(BaseModel):
    """On-disk JSON form of a knowledge graph"""
    entities: List[str] = Field(..., description="Vertex symbols present in the graph")
    edge_types: List[str] = Field(..., description="Edge-type alphabet; features are one-hot over it")
    edges: List[EdgeDocument] = Field(default_factory=list)
    registry: Optional[List[str]] = Field(None, description="One-hot index space; defaults to entities")
    aliases: Dict[str, str] = Field(default_factory=dict, description="Readable names for symbols")
