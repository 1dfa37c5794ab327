"""Extensive-form game trees with exact rational data.

A game document is UTF-8 JSON: ``{"players": [...], "root": <node>}`` where
``<node>`` is one of::

    {"kind": "chance",
     "actions": [{"label": str, "prob": "p/q", "child": <node>}, ...]}
    {"kind": "decision", "player": <0-based index>, "infoset": str,
     "actions": [{"label": str, "child": <node>}, ...]}
    {"kind": "terminal", "payoffs": ["p/q", ...]}  # one entry per player

Rationals are written "p/q" or "p". Infoset ids are scoped per player; every
node naming the same (player, infoset) pair must list identical action labels
in identical order, and under perfect recall all of an infoset's nodes share
the same history of own (infoset, action) pairs.

A :class:`Game` is immutable after construction and safe for concurrent
read-only use. Parsing never raises on semantic defects that are expressible
in the schema (broken perfect recall, chance probabilities that do not sum
to one, ...); those are reported by :meth:`Game.validate` as data. Schema
errors raise :class:`GameParseError` with a document path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import GameParseError, InvalidGameError
from .rational import format_rational, parse_rational

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class Sequence:
    """A point in a player's decision history: the empty sequence or a final
    (infoset, action) pair, which under perfect recall identifies the whole
    path of that player's choices."""

    player: int
    infoset: Optional[str]
    action: Optional[str]

    @classmethod
    def empty(cls, player: int) -> "Sequence":
        return cls(player, None, None)

    @property
    def is_empty(self) -> bool:
        return self.infoset is None

    def label(self) -> str:
        if self.is_empty:
            return "empty"
        return f"{self.infoset}:{self.action}"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.label()


@dataclass(frozen=True)
class Violation:
    kind: str  # perfect-recall | chance-sum | infoset-action-mismatch | tree-shape
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"kind": v.kind, "location": v.location, "message": v.message}
                for v in self.violations
            ],
        }


class Node:
    __slots__ = ("parent", "path", "depth")

    kind = "node"


class ChanceNode(Node):
    __slots__ = ("moves",)

    kind = "chance"

    def __init__(self, moves):
        self.moves = moves  # list of (label, Fraction prob, Node)


class DecisionNode(Node):
    __slots__ = ("player", "infoset_id", "moves", "own_seq")

    kind = "decision"

    def __init__(self, player, infoset_id, moves):
        self.player = player
        self.infoset_id = infoset_id
        self.moves = moves  # list of (label, Node)


class TerminalNode(Node):
    __slots__ = ("payoffs", "index", "terminal_id", "chance_reach", "own_pairs", "last_seq")

    kind = "terminal"

    def __init__(self, payoffs):
        self.payoffs = payoffs  # tuple of Fraction, one per player


class Infoset:
    """A player's information set: the nodes it cannot tell apart.

    ``own_history`` is the shared list of (infoset id, action) pairs of that
    player on the path from the root (excluding this infoset itself), and
    ``parent_seq`` the corresponding :class:`Sequence`.
    """

    __slots__ = ("player", "id", "index", "actions", "nodes", "own_history",
                 "parent_seq", "terminals_below")

    def __init__(self, player, id_, index, actions, own_history, parent_seq):
        self.player = player
        self.id = id_
        self.index = index
        self.actions = actions
        self.nodes = []
        self.own_history = own_history
        self.parent_seq = parent_seq
        self.terminals_below = []  # (terminal index, offset into own_pairs[player])

    def __repr__(self):  # pragma: no cover
        return f"Infoset(P{self.player}, {self.id!r}, actions={list(self.actions)})"


class Game:
    """Immutable indexed view of a parsed game tree."""

    def __init__(self, players: tuple[str, ...], root: Node):
        self.players = players
        self.n = len(players)
        self.root = root
        self.terminals: list[TerminalNode] = []
        self.infosets: list[list[Infoset]] = [[] for _ in players]
        self._infoset_by_key: dict[tuple[int, str], Infoset] = {}
        self._violations: list[Violation] = []
        self.num_nodes = 0
        self.num_chance_nodes = 0
        self._build()
        self._sequences: list[list[Sequence]] = []
        self._children_infosets: list[dict[Sequence, list[Infoset]]] = []
        self._terminals_by_lastseq: list[dict[Sequence, list[int]]] = []
        self._index_sequences()
        self._validation = ValidationReport(
            ok=not self._violations, violations=tuple(self._violations)
        )

    # -- construction ---------------------------------------------------

    def _build(self):
        n = self.n
        # stack entries: (node, parent, path, chance, pairs, pair_ids)
        #   pairs[i]   = tuple of (infoset index, action) for player i on the path
        #   pair_ids[i]= tuple of (infoset id, action), used for recall checks
        root_pairs = tuple(() for _ in range(n))
        stack = [(self.root, None, (), ONE, root_pairs, root_pairs)]
        while stack:
            node, parent, path, chance, pairs, pair_ids = stack.pop()
            node.parent = parent
            node.path = path
            node.depth = len(path)
            self.num_nodes += 1
            loc = "/".join(path) or "."
            if node.kind == "terminal":
                node.index = len(self.terminals)
                node.terminal_id = loc
                node.chance_reach = chance
                node.own_pairs = pairs
                node.last_seq = tuple(
                    Sequence(i, *pair_ids[i][-1]) if pair_ids[i] else Sequence.empty(i)
                    for i in range(n)
                )
                self.terminals.append(node)
                continue
            labels = [m[0] for m in node.moves]
            if not labels:
                self._violations.append(
                    Violation("tree-shape", loc, "node has no actions"))
            if len(set(labels)) != len(labels):
                self._violations.append(
                    Violation("tree-shape", loc, "duplicate action labels at one node"))
            if node.kind == "chance":
                self.num_chance_nodes += 1
                total = sum((m[1] for m in node.moves), ZERO)
                if node.moves and total != 1:
                    self._violations.append(Violation(
                        "chance-sum", loc,
                        f"chance probabilities sum to {format_rational(total)}, not 1"))
                for label, prob, child in reversed(node.moves):
                    if prob < 0:
                        self._violations.append(Violation(
                            "chance-sum", loc, f"negative probability on action {label!r}"))
                    stack.append((child, node, path + (label,), chance * prob,
                                  pairs, pair_ids))
                continue
            # decision node
            i = node.player
            iset = self._infoset_by_key.get((i, node.infoset_id))
            if iset is None:
                iset = Infoset(i, node.infoset_id, len(self.infosets[i]),
                               tuple(labels), pair_ids[i],
                               Sequence(i, *pair_ids[i][-1]) if pair_ids[i]
                               else Sequence.empty(i))
                self._infoset_by_key[(i, node.infoset_id)] = iset
                self.infosets[i].append(iset)
            else:
                if iset.actions != tuple(labels):
                    self._violations.append(Violation(
                        "infoset-action-mismatch", loc,
                        f"infoset {node.infoset_id!r} lists actions {labels}, "
                        f"first seen with {list(iset.actions)}"))
                if iset.own_history != pair_ids[i]:
                    self._violations.append(Violation(
                        "perfect-recall", loc,
                        f"infoset {node.infoset_id!r} mixes own histories "
                        f"{list(iset.own_history)} and {list(pair_ids[i])}"))
            iset.nodes.append(node)
            node.own_seq = iset.parent_seq
            for label, child in reversed(node.moves):
                new_pairs = list(pairs)
                new_pairs[i] = pairs[i] + ((iset.index, label),)
                new_ids = list(pair_ids)
                new_ids[i] = pair_ids[i] + ((node.infoset_id, label),)
                stack.append((child, node, path + (label,), chance,
                              tuple(new_pairs), tuple(new_ids)))

    def _index_sequences(self):
        for i in range(self.n):
            seqs = [Sequence.empty(i)]
            children: dict[Sequence, list[Infoset]] = {Sequence.empty(i): []}
            for iset in self.infosets[i]:
                children.setdefault(iset.parent_seq, [])
                for a in iset.actions:
                    s = Sequence(i, iset.id, a)
                    seqs.append(s)
                    children.setdefault(s, [])
            for iset in self.infosets[i]:
                if iset.parent_seq in children:
                    children[iset.parent_seq].append(iset)
            by_last: dict[Sequence, list[int]] = {}
            for z in self.terminals:
                by_last.setdefault(z.last_seq[i], []).append(z.index)
            self._sequences.append(seqs)
            self._children_infosets.append(children)
            self._terminals_by_lastseq.append(by_last)
        for z in self.terminals:
            for i in range(self.n):
                for offset, (idx, _a) in enumerate(z.own_pairs[i]):
                    self.infosets[i][idx].terminals_below.append((z.index, offset))

    # -- validation -----------------------------------------------------

    def validate(self) -> ValidationReport:
        """Report perfect-recall, chance-sum, infoset and shape defects.

        Violations are data, not exceptions; ``ok`` is True iff none exist.
        """
        return self._validation

    def require_valid(self):
        if not self._validation.ok:
            first = self._validation.violations[0]
            raise InvalidGameError(
                f"game fails validation ({first.kind} at {first.location}: {first.message})")

    # -- lookups ----------------------------------------------------------

    def player_index(self, player: Union[int, str]) -> int:
        if isinstance(player, int):
            if not 0 <= player < self.n:
                raise KeyError(f"no player with index {player}")
            return player
        try:
            return self.players.index(player)
        except ValueError:
            raise KeyError(f"unknown player {player!r}") from None

    def infoset(self, player: Union[int, str], infoset_id: str) -> Infoset:
        i = self.player_index(player)
        try:
            return self._infoset_by_key[(i, infoset_id)]
        except KeyError:
            raise KeyError(f"player {self.players[i]} has no infoset {infoset_id!r}") from None

    def sequences(self, player: Union[int, str]) -> list[Sequence]:
        """The empty sequence followed by one sequence per (infoset, action),
        infosets in discovery order. Use :meth:`precedes` for order queries."""
        self.require_valid()
        return list(self._sequences[self.player_index(player)])

    def sequence(self, player: Union[int, str], infoset_id: Optional[str],
                 action: Optional[str] = None) -> Sequence:
        i = self.player_index(player)
        if infoset_id is None:
            return Sequence.empty(i)
        iset = self.infoset(i, infoset_id)
        if action not in iset.actions:
            raise KeyError(f"infoset {infoset_id!r} has no action {action!r}")
        return Sequence(i, infoset_id, action)

    def children_infosets(self, seq: Sequence) -> list[Infoset]:
        """Infosets whose parent sequence is ``seq``."""
        return self._children_infosets[seq.player].get(seq, [])

    def top_infosets(self, player: Union[int, str]) -> list[Infoset]:
        i = self.player_index(player)
        return self._children_infosets[i][Sequence.empty(i)]

    def terminals_by_last_sequence(self, seq: Sequence) -> list[int]:
        """Indices of terminals whose last own pair of ``seq.player`` is ``seq``."""
        return self._terminals_by_lastseq[seq.player].get(seq, [])

    def terminal(self, terminal_id: str) -> TerminalNode:
        for z in self.terminals:
            if z.terminal_id == terminal_id:
                return z
        raise KeyError(f"no terminal {terminal_id!r}")

    def node_at(self, path: Iterable[str]) -> Node:
        node = self.root
        for label in path:
            if node.kind == "terminal":
                raise KeyError(f"path descends past terminal {node.terminal_id!r}")
            for m in node.moves:
                if m[0] == label:
                    node = m[-1]
                    break
            else:
                raise KeyError(f"no action {label!r} at node {'/'.join(node.path) or '.'}")
        return node

    # -- the partial order over sequences, infosets and nodes ------------

    def precedes(self, a, b) -> bool:
        """The game's ancestry order: ``a`` precedes-or-equals ``b``.

        Accepts :class:`Sequence`, :class:`Infoset` and :class:`Node`
        arguments in any combination (sequences and infosets must belong to
        the same player). Answers in O(depth).
        """
        if isinstance(a, Node) and isinstance(b, Node):
            while b is not None:
                if b is a:
                    return True
                b = b.parent
            return False
        if isinstance(b, Node):
            # infoset-or-sequence vs node: look at the own pairs above b
            pairs, own_isets = self._own_path_of_node(b, a.player)
            if isinstance(a, Sequence):
                return a.is_empty or (a.infoset, a.action) in pairs
            return a.id in own_isets
        if isinstance(a, Node):
            # node vs infoset/sequence: a must be an ancestor of a witness node
            player = b.player
            if isinstance(b, Sequence):
                if b.is_empty:
                    return a is self.root
                targets = self.infoset(player, b.infoset).nodes
            else:
                targets = b.nodes
            return any(self.precedes(a, h) for h in targets)
        if a.player != b.player:
            raise ValueError("sequences/infosets of different players are unordered")
        hist_b = self._history_of(b)
        iset_b = self._infoset_of(b)
        if isinstance(a, Sequence):
            if a.is_empty:
                return True
            if isinstance(b, Sequence) and not b.is_empty \
                    and (a.infoset, a.action) == (b.infoset, b.action):
                return True
            return (a.infoset, a.action) in hist_b
        # a is an Infoset
        a_id = a.id
        if iset_b is not None and a_id == iset_b:
            return not (isinstance(b, Sequence) and b.is_empty)
        return any(j == a_id for j, _ in hist_b)

    def _infoset_of(self, x) -> Optional[str]:
        if isinstance(x, Sequence):
            return x.infoset
        return x.id

    def _history_of(self, x) -> tuple:
        if isinstance(x, Sequence):
            if x.is_empty:
                return ()
            return self.infoset(x.player, x.infoset).own_history
        return x.own_history

    def _own_path_of_node(self, node: Node, player: int):
        pairs = set()
        isets = set()
        child = node
        cur = node.parent
        if node.kind == "decision" and node.player == player:
            isets.add(node.infoset_id)
        while cur is not None:
            if cur.kind == "decision" and cur.player == player:
                label = child.path[len(cur.path)]
                pairs.add((cur.infoset_id, label))
                isets.add(cur.infoset_id)
            child = cur
            cur = cur.parent
        return pairs, isets

    # -- chance ----------------------------------------------------------

    def chance_reach(self, z: Union[TerminalNode, str]) -> Fraction:
        """Product of chance probabilities on the root-to-terminal path."""
        if isinstance(z, str):
            z = self.terminal(z)
        return z.chance_reach


# -- parsing and serialization -------------------------------------------


def parse_game(text: str) -> Game:
    """Parse a UTF-8 game document. Exact round-trip with
    :func:`serialize_game` after one canonicalization pass."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameParseError(f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
    if not isinstance(doc, dict):
        raise GameParseError("top level must be an object")
    players = doc.get("players")
    if not isinstance(players, list) or not players or \
            not all(isinstance(p, str) for p in players):
        raise GameParseError("\"players\" must be a non-empty list of strings", "players")
    if len(set(players)) != len(players):
        raise GameParseError("player names must be distinct", "players")
    if "root" not in doc:
        raise GameParseError("missing \"root\"")
    root = _parse_node(doc["root"], "root", len(players))
    return Game(tuple(players), root)


def _parse_node(spec, where: str, n: int) -> Node:
    if not isinstance(spec, dict):
        raise GameParseError("node must be an object", where)
    kind = spec.get("kind")
    if kind == "terminal":
        payoffs = spec.get("payoffs")
        if not isinstance(payoffs, list):
            raise GameParseError("terminal needs a \"payoffs\" list", where)
        if len(payoffs) != n:
            raise GameParseError(
                f"payoff vector has {len(payoffs)} entries for {n} players", where)
        try:
            values = tuple(parse_rational(p) for p in payoffs)
        except ValueError as e:
            raise GameParseError(str(e), f"{where}/payoffs") from e
        return TerminalNode(values)
    if kind == "chance":
        moves = []
        for k, item in enumerate(_actions_of(spec, where)):
            sub = f"{where}/actions/{k}"
            label = _label_of(item, sub)
            if "prob" not in item:
                raise GameParseError("chance action needs \"prob\"", sub)
            try:
                prob = parse_rational(item["prob"])
            except ValueError as e:
                raise GameParseError(str(e), f"{sub}/prob") from e
            moves.append((label, prob, _parse_node(_child_of(item, sub), f"{sub}/child", n)))
        return ChanceNode(moves)
    if kind == "decision":
        player = spec.get("player")
        if not isinstance(player, int) or isinstance(player, bool) or not 0 <= player < n:
            raise GameParseError(
                f"\"player\" must be an integer in [0, {n}), got {player!r}", where)
        infoset = spec.get("infoset")
        if not isinstance(infoset, str) or not infoset:
            raise GameParseError("\"infoset\" must be a non-empty string", where)
        moves = []
        for k, item in enumerate(_actions_of(spec, where)):
            sub = f"{where}/actions/{k}"
            label = _label_of(item, sub)
            moves.append((label, _parse_node(_child_of(item, sub), f"{sub}/child", n)))
        return DecisionNode(player, infoset, moves)
    raise GameParseError(f"unknown node kind {kind!r}", where)


def _actions_of(spec, where):
    actions = spec.get("actions")
    if not isinstance(actions, list):
        raise GameParseError("node needs an \"actions\" list", where)
    return actions


def _label_of(item, where):
    if not isinstance(item, dict):
        raise GameParseError("action must be an object", where)
    label = item.get("label")
    if not isinstance(label, str) or not label:
        raise GameParseError("action needs a non-empty string \"label\"", where)
    return label


def _child_of(item, where):
    if "child" not in item:
        raise GameParseError("action needs a \"child\" node", where)
    return item["child"]


def serialize_game(game: Game) -> str:
    """Canonical document for a game: stable key order, rationals as "p/q"."""
    return json.dumps(
        {"players": list(game.players), "root": _node_dict(game.root)},
        indent=2, ensure_ascii=False) + "\n"


def _node_dict(node: Node) -> dict:
    if node.kind == "terminal":
        return {"kind": "terminal",
                "payoffs": [format_rational(u) for u in node.payoffs]}
    if node.kind == "chance":
        return {"kind": "chance", "actions": [
            {"label": label, "prob": format_rational(prob), "child": _node_dict(child)}
            for label, prob, child in node.moves]}
    return {"kind": "decision", "player": node.player, "infoset": node.infoset_id,
            "actions": [{"label": label, "child": _node_dict(child)}
                        for label, child in node.moves]}
