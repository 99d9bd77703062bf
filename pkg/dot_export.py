"""
DOT rendering of nets and event structures through graphviz
"""

from typing import Optional, Union

import graphviz

from event_structure import EventStructureCore, ReversiblePes
from inhibitor_net import InhibitorNet
from naming import reverser_name
from net_classes import BackwardPartition


def net_to_dot(net: InhibitorNet, partition: Optional[BackwardPartition] = None, name: str = "net") -> str:
    """
    Places are circles (filled when marked), transitions boxes (dashed when
    backward), flow arcs plain edges and inhibitor arcs red edges ending in a circle
    """
    backward = partition.backward if partition is not None else frozenset()
    graph = graphviz.Digraph(name)
    graph.attr(rankdir="LR")
    for place in net.places:
        tokens = net.initial_marking[place]
        attrs = {"shape": "circle", "label": place}
        if tokens:
            attrs.update(style="filled", fillcolor="lightgrey")
            if tokens > 1:
                attrs["xlabel"] = str(tokens)
        graph.node(place, **attrs)
    for transition in net.transitions:
        attrs = {"shape": "box", "label": transition}
        if transition in backward:
            attrs["style"] = "dashed"
        graph.node(transition, **attrs)
    for source, target in sorted(net.flow):
        graph.edge(source, target)
    for place, transition in sorted(net.inhibit):
        graph.edge(place, transition, arrowhead="odot", color="red")
    return graph.source


def es_to_dot(structure: Union[EventStructureCore, ReversiblePes], name: str = "es") -> str:
    """
    Events are ellipses (double when undoable), causality solid arrows, conflict
    dashed undirected edges; undo nodes carry reverse-causality (dotted) and
    prevention (tee) edges
    """
    reversible = isinstance(structure, ReversiblePes)
    core = structure.core if reversible else structure
    undoable = structure.undoable if reversible else frozenset()
    graph = graphviz.Digraph(name)
    for event in core.events:
        attrs = {"shape": "ellipse"}
        if event in undoable:
            attrs["peripheries"] = "2"
        graph.node(event, **attrs)
    for cause, effect in sorted(core.causality):
        graph.edge(cause, effect)
    for first, second in sorted(core.conflict):
        graph.edge(first, second, dir="none", style="dashed", label="#")
    if reversible:
        for u in sorted(undoable):
            graph.node(reverser_name(u), shape="plaintext")
        for event, u in sorted(structure.rev_causality):
            graph.edge(event, reverser_name(u), style="dotted")
        for event, u in sorted(structure.prevention):
            graph.edge(event, reverser_name(u), arrowhead="tee", color="red")
    return graph.source
