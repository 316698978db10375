"""Graph presentations, their normal form and exact component analysis."""

from .builders import OMEGA, Presentation, from_kind
from .components import ComponentDescriptor, ComponentSpace, components_minus
from .ops import adjacency, exhaustion

__all__ = ["OMEGA", "Presentation", "from_kind", "ComponentDescriptor", "ComponentSpace",
           "components_minus", "adjacency", "exhaustion"]
