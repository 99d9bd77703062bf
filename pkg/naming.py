"""
Canonical names for the places and transitions generated by the encodings
"""

REVERSER_PREFIX = "~"


def pre_place(event: str) -> str:
    """Place marked while `event` has not happened"""
    return f"(*,{event})"


def post_place(event: str) -> str:
    """Place marked once `event` has happened"""
    return f"({event},*)"


def conflict_place(first: str, second: str) -> str:
    """Shared place of two conflicting events; the pair is unordered"""
    left, right = sorted((first, second))
    return f"({{{left},{right}}},#)"


def dependency_place(cause: str, effect: str) -> str:
    """Condition produced by `cause` and consumed by `effect`"""
    return f"({cause},{effect})"


def reverser_name(event: str) -> str:
    return f"{REVERSER_PREFIX}{event}"
