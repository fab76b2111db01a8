"""Feature-annotated context-free grammar over lexical categories.

Rule files hold one production per line::

    # sentence spine
    S(p,n) -> SNS(p,n,g) PRED(p,n)
    SNS(p,n,g) -> determiner(n,g) noun(n,g)

The first rule's head is the start symbol. Lowercase lexical category names
(noun, verb, ...) are terminals; every other symbol needs at least one rule.
Parenthesized variables express agreement links: within one rule, equal names
mean equal values. A variable's leading letter picks its axis (p person,
n number, g gender, t tense, m mood).

Recursion is bounded: no nonterminal may occur more than ``depth_limit``
times on any root-to-leaf path, which keeps enumeration finite.
"""

import re
from dataclasses import dataclass

from .errors import CycleError, GrammarParseError, UndefinedSymbolError
from .features import LexicalCategory

TERMINALS = frozenset(cat.value for cat in LexicalCategory)

AXIS_FOR_PREFIX = {
    "p": "person",
    "n": "number",
    "g": "gender",
    "t": "tense",
    "m": "mood",
}

_SYMBOL_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\(([^()]*)\))?$")


@dataclass(frozen=True)
class SymbolRef:
    """One symbol occurrence in a rule, with its agreement variables."""

    name: str
    variables: tuple = ()

    @property
    def is_terminal(self):
        return self.name in TERMINALS


@dataclass(frozen=True)
class GrammarRule:
    head: SymbolRef
    body: tuple
    index: int

    def __str__(self):
        def fmt(ref):
            if ref.variables:
                return "%s(%s)" % (ref.name, ",".join(ref.variables))
            return ref.name

        return "%s -> %s" % (fmt(self.head), " ".join(fmt(ref) for ref in self.body))


@dataclass(frozen=True)
class TreeNode:
    """Derivation tree skeleton node; terminal leaves have no children."""

    symbol: str
    children: tuple = ()
    rule_index: int = -1

    @property
    def is_leaf(self):
        return not self.children

    def leaf_sequence(self):
        if self.is_leaf:
            return (self.symbol,)
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.symbol)
            else:
                stack.extend(reversed(node.children))
        return tuple(out)

    def __str__(self):
        if self.is_leaf:
            return self.symbol
        return "%s(%s)" % (self.symbol, " ".join(str(child) for child in self.children))


@dataclass
class Grammar:
    rules: tuple
    start: str
    depth_limit: int = 2

    def __post_init__(self):
        by_head = {}
        for rule in self.rules:
            by_head.setdefault(rule.head.name, []).append(rule)
        self.rules_for = by_head
        self._min_leaves = self._compute_min_leaves()

    def _compute_min_leaves(self):
        """Lower bound on leaf count per symbol, for search pruning."""
        bounds = {name: 1 for name in TERMINALS}
        pending = set(self.rules_for)
        changed = True
        while changed:
            changed = False
            for name in list(pending):
                best = None
                for rule in self.rules_for[name]:
                    total = 0
                    feasible = True
                    for ref in rule.body:
                        if ref.name in bounds:
                            total += bounds[ref.name]
                        else:
                            feasible = False
                            break
                    if feasible and (best is None or total < best):
                        best = total
                if best is not None:
                    bounds[name] = best
                    pending.discard(name)
                    changed = True
        for name in pending:
            bounds[name] = 1
        return bounds

    def min_leaves(self, symbol):
        return self._min_leaves.get(symbol, 1)


def _parse_symbol(token, line_number):
    match = _SYMBOL_RE.match(token)
    if not match:
        raise GrammarParseError("cannot parse symbol %r" % token, line_number)
    name, raw_vars = match.group(1), match.group(2)
    variables = ()
    if raw_vars:
        variables = tuple(var.strip() for var in raw_vars.split(",") if var.strip())
        for var in variables:
            if var[0] not in AXIS_FOR_PREFIX:
                raise GrammarParseError(
                    "variable %r on %r has no axis prefix (p/n/g/t/m)" % (var, name),
                    line_number,
                )
    return SymbolRef(name=name, variables=variables)


def parse_grammar(text, depth_limit=2):
    rules = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise GrammarParseError("missing '->'", line_number)
        head_part, body_part = line.split("->", 1)
        head = _parse_symbol(head_part.strip(), line_number)
        if head.is_terminal:
            raise GrammarParseError(
                "terminal category %r cannot head a rule" % head.name, line_number
            )
        body_tokens = body_part.split()
        if not body_tokens:
            raise GrammarParseError("empty rule body", line_number)
        body = tuple(_parse_symbol(token, line_number) for token in body_tokens)
        rules.append(GrammarRule(head=head, body=body, index=len(rules)))
    if not rules:
        raise GrammarParseError("grammar has no rules")
    heads = {rule.head.name for rule in rules}
    for rule in rules:
        for ref in rule.body:
            if not ref.is_terminal and ref.name not in heads:
                raise UndefinedSymbolError(
                    "symbol %r has no rule and is not a lexical category" % ref.name
                )
    return Grammar(rules=tuple(rules), start=rules[0].head.name, depth_limit=depth_limit)


def load_grammar(path, depth_limit=2):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_grammar(handle.read(), depth_limit=depth_limit)


_LEAF_CACHE = {name: TreeNode(symbol=name) for name in TERMINALS}


def _usage_key(usage):
    return tuple(sorted(usage.items()))


def _expand(grammar, symbol, usage, memo):
    """All subtrees for ``symbol`` under the path-usage profile, rule order."""
    if symbol in TERMINALS:
        return (_LEAF_CACHE[symbol],)
    key = (symbol, _usage_key(usage))
    cached = memo.get(key)
    if cached is not None:
        return cached
    results = []
    for rule in grammar.rules_for.get(symbol, ()):
        child_options = []
        feasible = True
        for ref in rule.body:
            if ref.name in TERMINALS:
                child_options.append((_LEAF_CACHE[ref.name],))
                continue
            count = usage.get(ref.name, 0) + 1
            if count > grammar.depth_limit:
                feasible = False
                break
            child_usage = dict(usage)
            child_usage[ref.name] = count
            options = _expand(grammar, ref.name, child_usage, memo)
            if not options:
                feasible = False
                break
            child_options.append(options)
        if not feasible:
            continue
        results.extend(
            TreeNode(symbol=symbol, children=combo, rule_index=rule.index)
            for combo in _product(child_options)
        )
    memo[key] = tuple(results)
    return memo[key]


def _product(option_lists):
    """Cross product preserving leftmost-major order."""
    if not option_lists:
        yield ()
        return
    head, rest = option_lists[0], option_lists[1:]
    if not rest:
        for item in head:
            yield (item,)
        return
    for item in head:
        for tail in _product(rest):
            yield (item,) + tail


def enumerate_trees(grammar):
    """Finite stream of derivation skeletons in deterministic DFS order.

    Order follows rule file order with leftmost expansion; no tree re-enters
    any nonterminal more than ``grammar.depth_limit`` times on one path.
    """
    memo = {}
    start_usage = {grammar.start: 1}
    for rule in grammar.rules_for.get(grammar.start, ()):
        child_options = []
        feasible = True
        for ref in rule.body:
            if ref.name in TERMINALS:
                child_options.append((_LEAF_CACHE[ref.name],))
                continue
            count = start_usage.get(ref.name, 0) + 1
            if count > grammar.depth_limit:
                feasible = False
                break
            child_usage = dict(start_usage)
            child_usage[ref.name] = count
            options = _expand(grammar, ref.name, child_usage, memo)
            if not options:
                feasible = False
                break
            child_options.append(options)
        if not feasible:
            continue
        for combo in _product(child_options):
            yield TreeNode(symbol=grammar.start, children=combo, rule_index=rule.index)


def match_leaf_sequence(grammar, cats):
    """Trees whose leaf sequence equals ``cats`` exactly, in DFS order.

    Equivalent to filtering enumerate_trees() on the leaf sequence, but
    searches top-down with length pruning.
    """
    if not cats:
        raise ValueError("empty category sequence")
    cats = tuple(cat.value if isinstance(cat, LexicalCategory) else cat for cat in cats)
    length = len(cats)
    results = []

    def expand(symbol, usage, position):
        """Yield (node, next_position) for derivations of symbol at position."""
        if symbol in TERMINALS:
            if position < length and cats[position] == symbol:
                yield _LEAF_CACHE[symbol], position + 1
            return
        if position + grammar.min_leaves(symbol) > length:
            return
        for rule in grammar.rules_for.get(symbol, ()):
            yield from expand_body(rule, 0, usage, position, ())

    def expand_body(rule, body_index, usage, position, built):
        if body_index == len(rule.body):
            yield TreeNode(
                symbol=rule.head.name, children=built, rule_index=rule.index
            ), position
            return
        ref = rule.body[body_index]
        remaining_min = sum(
            grammar.min_leaves(other.name) for other in rule.body[body_index + 1 :]
        )
        if ref.name in TERMINALS:
            if position < length and cats[position] == ref.name:
                if position + 1 + remaining_min <= length:
                    yield from expand_body(
                        rule,
                        body_index + 1,
                        usage,
                        position + 1,
                        built + (_LEAF_CACHE[ref.name],),
                    )
            return
        count = usage.get(ref.name, 0) + 1
        if count > grammar.depth_limit:
            return
        child_usage = dict(usage)
        child_usage[ref.name] = count
        for child, next_position in expand(ref.name, child_usage, position):
            if next_position + remaining_min > length:
                continue
            yield from expand_body(
                rule, body_index + 1, usage, next_position, built + (child,)
            )

    for tree, end in expand(grammar.start, {grammar.start: 1}, 0):
        if end == length:
            results.append(tree)
    return results


def propagate_features(grammar, tree, root_assignment):
    """Push a root axis valuation through the rule equations of ``tree``.

    Returns a list of (node, assignment) pairs in preorder, where assignment
    maps axis name to the propagated value (only linked axes appear). Used to
    check that equation-linked nodes always agree.
    """
    out = []

    def walk(node, assignment):
        out.append((node, dict(assignment)))
        if node.is_leaf or node.rule_index < 0:
            return
        rule = grammar.rules[node.rule_index]
        bindings = {}
        for var in rule.head.variables:
            axis = AXIS_FOR_PREFIX[var[0]]
            if axis in assignment:
                bindings[var] = assignment[axis]
        for ref, child in zip(rule.body, node.children):
            child_assignment = {}
            for var in ref.variables:
                if var in bindings:
                    child_assignment[AXIS_FOR_PREFIX[var[0]]] = bindings[var]
            walk(child, child_assignment)

    walk(tree, root_assignment)
    return out


def dfs_paths(root, adjacency):
    """Root-to-leaf paths of a rooted acyclic graph in DFS order.

    Children are followed in listed order with an explicit stack; each vertex
    is visited once (revisits through other parents are skipped). An edge
    back into the active path raises CycleError.
    """
    def children(node):
        return tuple(adjacency.get(node, ()))

    paths = []
    path = [root]
    on_path = {root}
    visited = {root}
    if not children(root):
        return [tuple(path)]
    iterators = [iter(children(root))]
    while iterators:
        try:
            nxt = next(iterators[-1])
        except StopIteration:
            iterators.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            raise CycleError("cycle through %r" % (nxt,))
        if nxt in visited:
            continue
        visited.add(nxt)
        kids = children(nxt)
        if not kids:
            paths.append(tuple(path) + (nxt,))
            continue
        path.append(nxt)
        on_path.add(nxt)
        iterators.append(iter(kids))
    return paths
