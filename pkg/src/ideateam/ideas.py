"""OFBS idea cards, lineage via update chains, and multi-rater evaluations.

Updates never mutate a card in place: each update appends a new card whose
parent pointer records lineage, so the board doubles as a replayable history.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ._canon import canonical_dumps

SCORE_MIN = 1
SCORE_MAX = 7

OFBS_FIELDS = ("object", "function", "behavior", "structure")


class IncompleteIdeaError(ValueError):
    """One or more OFBS fields are empty."""


class UnknownIdeaError(KeyError):
    """No idea with that id on the board."""


class ScoreOutOfRangeError(ValueError):
    """An evaluation score falls outside 1..7."""


class IdeaContent(BaseModel):
    """Title plus the four-part idea representation.

    Deliberately permissive at parse time so the board can report emptiness
    as :class:`IncompleteIdeaError` instead of a type error.
    """

    model_config = ConfigDict(extra="forbid")

    title: str = ""
    object: str = ""
    function: str = ""
    behavior: str = ""
    structure: str = ""


class Idea(BaseModel):
    model_config = ConfigDict(extra="forbid")

    idea_id: str
    title: str
    object: str
    function: str
    behavior: str
    structure: str
    author: str
    parent_id: Optional[str] = None
    created_at: float

    def text_length(self) -> int:
        """Character count of the card's content (title + OFBS fields)."""
        return len(self.title) + sum(len(getattr(self, f)) for f in OFBS_FIELDS)


class Evaluation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    idea_id: str
    evaluator: str
    novelty: int
    completeness: int
    quality: int
    comment: Optional[str] = None
    created_at: float

    def scores(self) -> tuple[int, int, int]:
        return (self.novelty, self.completeness, self.quality)


class IdeaBoard:
    """Ordered idea collection plus all evaluations; single-writer by contract."""

    def __init__(self) -> None:
        self.ideas: list[Idea] = []
        self.evaluations: list[Evaluation] = []
        self._by_id: dict[str, Idea] = {}
        self._next_id = 1

    def __len__(self) -> int:
        return len(self.ideas)

    def __contains__(self, idea_id: str) -> bool:
        return idea_id in self._by_id

    def get(self, idea_id: str) -> Idea:
        try:
            return self._by_id[idea_id]
        except KeyError:
            raise UnknownIdeaError(idea_id) from None

    def _resolve_at(self, at: Optional[float]) -> float:
        last = self.ideas[-1].created_at if self.ideas else 0.0
        if at is None:
            return last
        if at < last:
            raise ValueError(f"created_at must be non-decreasing (got {at} after {last})")
        return at

    @staticmethod
    def _check_content(content: IdeaContent) -> None:
        empty = [f for f in OFBS_FIELDS if not getattr(content, f).strip()]
        if empty:
            raise IncompleteIdeaError(f"empty OFBS fields: {', '.join(empty)}")

    def create_idea(self, author: str, content: IdeaContent, at: Optional[float] = None) -> str:
        """Append a brand-new card (no lineage); returns its fresh id."""
        self._check_content(content)
        return self._append(author, content, parent_id=None, at=at)

    def update_idea(self, author: str, parent_id: str, content: IdeaContent, at: Optional[float] = None) -> str:
        """Append a refinement of an existing card; the parent stays on the board."""
        self.get(parent_id)
        self._check_content(content)
        return self._append(author, content, parent_id=parent_id, at=at)

    def _append(self, author: str, content: IdeaContent, parent_id: Optional[str], at: Optional[float]) -> str:
        idea_id = f"idea-{self._next_id}"
        self._next_id += 1
        idea = Idea(
            idea_id=idea_id,
            title=content.title,
            object=content.object,
            function=content.function,
            behavior=content.behavior,
            structure=content.structure,
            author=author,
            parent_id=parent_id,
            created_at=self._resolve_at(at),
        )
        self.ideas.append(idea)
        self._by_id[idea_id] = idea
        return idea_id

    def add_idea(self, idea: Idea) -> None:
        """Insert a fully-formed card (replay path); ids must stay unique."""
        if idea.idea_id in self._by_id:
            raise ValueError(f"duplicate idea id {idea.idea_id}")
        if idea.parent_id is not None:
            self.get(idea.parent_id)
        self.ideas.append(idea)
        self._by_id[idea.idea_id] = idea
        # Keep generated ids disjoint from replayed ones.
        tail = idea.idea_id.rsplit("-", 1)[-1]
        if tail.isdigit():
            self._next_id = max(self._next_id, int(tail) + 1)

    def add_evaluation(self, evaluation: Evaluation) -> None:
        """Append a rating; re-evaluation by the same rater is kept, never merged."""
        self.get(evaluation.idea_id)
        for name, score in zip(("novelty", "completeness", "quality"), evaluation.scores()):
            if not SCORE_MIN <= score <= SCORE_MAX:
                raise ScoreOutOfRangeError(f"{name}={score} outside {SCORE_MIN}..{SCORE_MAX}")
        self.evaluations.append(evaluation)

    def evaluations_of(self, idea_id: str) -> list[Evaluation]:
        self.get(idea_id)
        return [e for e in self.evaluations if e.idea_id == idea_id]

    def mean_rating(self, idea_id: str) -> Optional[float]:
        """Pooled mean of all scores across all evaluations, half-up to one decimal."""
        evals = self.evaluations_of(idea_id)
        if not evals:
            return None
        scores = [s for e in evals for s in e.scores()]
        mean = Decimal(sum(scores)) / Decimal(len(scores))
        return float(mean.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))

    def lineage(self, idea_id: str) -> list[Idea]:
        """Root-first chain of cards ending at ``idea_id``."""
        chain = [self.get(idea_id)]
        seen = {idea_id}
        while chain[0].parent_id is not None:
            parent = self.get(chain[0].parent_id)
            if parent.idea_id in seen:
                raise ValueError(f"lineage cycle at {parent.idea_id}")
            seen.add(parent.idea_id)
            chain.insert(0, parent)
        return chain

    def to_json(self) -> str:
        return canonical_dumps(
            {
                "ideas": [i.model_dump(mode="json") for i in self.ideas],
                "evaluations": [e.model_dump(mode="json") for e in self.evaluations],
            }
        )

    @classmethod
    def from_json(cls, payload: str) -> "IdeaBoard":
        import json

        data = json.loads(payload)
        board = cls()
        for raw in data["ideas"]:
            board.add_idea(Idea.model_validate(raw))
        for raw in data["evaluations"]:
            board.add_evaluation(Evaluation.model_validate(raw))
        return board
