"""Doctor-style triage loop: match free-text symptoms, suggest co-occurring ones,
rank diseases, and serve per-disease detail.

Sessions are plain data; TriageEngine holds the shared immutable corpus and
lexicon. Every mutating step is appended to the session's action log, so a
session can be replayed to reproduce its ranking exactly.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Corpus, DiseaseRecord
from .normalize import SynonymLexicon, expand_tokens, jaccard, tokenize
from .ranking import RankedDisease, RankerParams, rank

DEFAULT_MATCH_THRESHOLD = 0.4
DEFAULT_TOP_K = 10
DEFAULT_SUGGESTION_BATCH = 5


class DialogueError(Exception):
    """A session action that would violate the dialogue contract."""


class SessionState(str, Enum):
    COLLECTING = "collecting"
    PREDICTED = "predicted"
    CLOSED = "closed"


@dataclass(frozen=True)
class SymptomMatch:
    text: str
    matched: str | None
    similarity: float
    alternatives: tuple[tuple[str, float], ...] = ()


@dataclass
class LogEntry:
    timestamp: float
    action: str
    payload: dict


@dataclass
class Session:
    id: str
    params: RankerParams
    created_at: float
    state: SessionState = SessionState.COLLECTING
    confirmed: list[str] = field(default_factory=list)
    declined: set[str] = field(default_factory=set)
    suggested_history: set[str] = field(default_factory=set)
    matched_from_text: set[str] = field(default_factory=set)
    last_ranking: list[RankedDisease] | None = None
    log: list[LogEntry] = field(default_factory=list)

    @property
    def confirmed_set(self) -> set[str]:
        return set(self.confirmed)

    def log_action(self, action: str, payload: dict) -> None:
        self.log.append(LogEntry(timestamp=time.time(), action=action, payload=payload))


class TriageEngine:
    """Runs triage sessions over one loaded corpus.

    The corpus, lexicon, and thresholds are immutable; sessions are the only
    mutable state, and callers serialize operations per session.
    """

    def __init__(self, corpus: Corpus, lexicon: SynonymLexicon,
                 match_threshold: float = DEFAULT_MATCH_THRESHOLD):
        if not 0 < match_threshold <= 1:
            raise ValueError(f"match threshold must be in (0, 1], got {match_threshold}")
        self.corpus = corpus
        self.lexicon = lexicon
        self.match_threshold = match_threshold

    def start_session(self, params: RankerParams | None = None) -> Session:
        if self.corpus.index.n_docs == 0:
            raise DialogueError("corpus is empty")
        params = params or RankerParams()
        session = Session(id=uuid.uuid4().hex, params=params, created_at=time.time())
        session.log_action("start", {"model": params.model.value,
                                     "k1": params.k1, "b": params.b})
        return session

    def _require_collecting(self, session: Session) -> None:
        if session.state is not SessionState.COLLECTING:
            raise DialogueError("session not collecting")

    def match_symptom(self, session: Session, text: str) -> SymptomMatch:
        """Best canonical symptom for free text, by Jaccard over expanded tokens.

        A match at or above the threshold is confirmed immediately. Ties go to
        the lexicographically smallest representative.
        """
        self._require_collecting(session)
        session.log_action("match_symptom", {"text": text})
        expanded = expand_tokens(tokenize(text), self.lexicon)
        scored = sorted(
            ((jaccard(expanded, e.expanded_tokens), e) for e in self.corpus.vocabulary),
            key=lambda pair: (-pair[0], pair[1].representative),
        )
        if not scored:
            return SymptomMatch(text=text, matched=None, similarity=0.0)
        best_sim, best = scored[0]
        if best_sim < self.match_threshold:
            # no match: the near misses themselves are the "did you mean" list
            alternatives = tuple((e.id, sim) for sim, e in scored if sim > 0)[:3]
            return SymptomMatch(text=text, matched=None, similarity=best_sim,
                                alternatives=alternatives)
        alternatives = tuple((e.id, sim) for sim, e in scored[1:] if sim > 0)[:3]
        # a typed symptom overrides an earlier decline; disjointness is preserved
        session.declined.discard(best.id)
        if best.id not in session.confirmed:
            session.confirmed.append(best.id)
        session.matched_from_text.add(best.id)
        return SymptomMatch(text=text, matched=best.id, similarity=best_sim,
                            alternatives=alternatives)

    def suggest_cooccurring(self, session: Session,
                            batch: int = DEFAULT_SUGGESTION_BATCH) -> list[tuple[str, int]]:
        """Unseen symptoms from diseases sharing a confirmed symptom, by disease count.

        Already confirmed, declined, or previously suggested symptoms are never
        offered again; an empty result means the candidates are exhausted.
        """
        self._require_collecting(session)
        if batch < 1:
            raise ValueError(f"batch must be >= 1, got {batch}")
        confirmed = session.confirmed_set
        if not confirmed:
            raise DialogueError("no seed symptoms")
        session.log_action("suggest", {"batch": batch})
        excluded = confirmed | session.declined | session.suggested_history
        counts: dict[str, int] = {}
        for record in self.corpus.records:
            if record.canonical_symptoms & confirmed:
                for cid in record.canonical_symptoms:
                    if cid not in excluded:
                        counts[cid] = counts.get(cid, 0) + 1
        ordered = sorted(
            counts.items(),
            key=lambda item: (-item[1], self.corpus.vocabulary.representative(item[0])),
        )[:batch]
        session.suggested_history.update(cid for cid, _ in ordered)
        return ordered

    def record_response(self, session: Session, symptom_id: str, answer: str) -> Session:
        """Apply a yes/no answer to a previously suggested symptom."""
        self._require_collecting(session)
        if answer not in ("yes", "no"):
            raise DialogueError(f"answer must be 'yes' or 'no', got {answer!r}")
        if symptom_id not in self.corpus.vocabulary:
            raise DialogueError(f"unknown symptom: {symptom_id}")
        if symptom_id not in session.suggested_history:
            raise DialogueError(f"symptom was never suggested: {symptom_id}")
        if symptom_id in session.confirmed or symptom_id in session.declined:
            raise DialogueError(f"duplicate response for {symptom_id}")
        session.log_action("response", {"symptom_id": symptom_id, "answer": answer})
        if answer == "yes":
            session.confirmed.append(symptom_id)
        else:
            session.declined.add(symptom_id)
        return session

    def predict(self, session: Session, k: int = DEFAULT_TOP_K) -> list[RankedDisease]:
        """Rank diseases against the confirmed symptoms; declined ones carry no weight."""
        if not session.confirmed:
            raise DialogueError("no confirmed symptoms to predict from")
        session.log_action("predict", {"k": k})
        ranking = rank(self.corpus.index, session.confirmed_set, session.params, k)
        session.last_ranking = ranking
        session.state = SessionState.PREDICTED
        return ranking

    def disease_detail(self, session: Session, index: int) -> DiseaseRecord:
        """Record behind 1-based rank `index` of the last prediction."""
        if session.state is SessionState.COLLECTING or not session.last_ranking:
            raise DialogueError("no prediction yet")
        if not 1 <= index <= len(session.last_ranking):
            raise DialogueError(f"invalid disease index: {index}")
        session.log_action("detail", {"index": index})
        return self.corpus.by_id[session.last_ranking[index - 1].disease_id]

    def close(self, session: Session) -> Session:
        if session.state is SessionState.PREDICTED:
            session.state = SessionState.CLOSED
        return session

    def replay(self, log: list[LogEntry]) -> Session:
        """Re-run an action log on a fresh session; reproduces rankings exactly."""
        session: Session | None = None
        for entry in log:
            if entry.action == "start":
                session = self.start_session(RankerParams(
                    model=entry.payload["model"],
                    k1=entry.payload["k1"],
                    b=entry.payload["b"],
                ))
                continue
            if session is None:
                session = self.start_session()
            if entry.action == "match_symptom":
                self.match_symptom(session, entry.payload["text"])
            elif entry.action == "suggest":
                self.suggest_cooccurring(session, entry.payload["batch"])
            elif entry.action == "response":
                self.record_response(session, entry.payload["symptom_id"],
                                     entry.payload["answer"])
            elif entry.action == "predict":
                self.predict(session, entry.payload["k"])
            elif entry.action == "detail":
                self.disease_detail(session, entry.payload["index"])
            else:
                raise DialogueError(f"unknown action in log: {entry.action}")
        return session if session is not None else self.start_session()
