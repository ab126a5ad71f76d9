"""Forgiving HTML element tree built on html.parser.

Gives the scraper just enough of a DOM: tag/attr/children nodes, document-order
search, and text extraction. Mismatched or unclosed tags never raise; garbage
input yields a (possibly empty) tree. All traversals are iterative, so deeply
nested or adversarial input cannot hit the recursion limit.
"""

from __future__ import annotations

from html.parser import HTMLParser

VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}
_MAX_DEPTH = 400


class Node:
    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list[Node | str] = []

    def __repr__(self):
        return f"<Node {self.tag} children={len(self.children)}>"

    def classes(self) -> set[str]:
        return set(self.attrs.get("class", "").split())

    def text(self) -> str:
        """Concatenated text of all descendants, document order."""
        parts = []
        stack: list[Node | str] = [self]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                parts.append(item)
            else:
                stack.extend(reversed(item.children))
        return "".join(parts)

    def iter_nodes(self):
        """All descendant element nodes (not self), document order."""
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            element_children = [c for c in node.children if isinstance(c, Node)]
            stack.extend(reversed(element_children))
            if node is not self:
                yield node

    def find_all(self, tag: str | None = None, class_: str | None = None,
                 id_: str | None = None) -> list["Node"]:
        found = []
        for node in self.iter_nodes():
            if tag is not None and node.tag != tag:
                continue
            if class_ is not None and class_ not in node.classes():
                continue
            if id_ is not None and node.attrs.get("id") != id_:
                continue
            found.append(node)
        return found

    def find(self, tag: str | None = None, class_: str | None = None,
             id_: str | None = None) -> "Node | None":
        for node in self.iter_nodes():
            if tag is not None and node.tag != tag:
                continue
            if class_ is not None and class_ not in node.classes():
                continue
            if id_ is not None and node.attrs.get("id") != id_:
                continue
            return node
        return None


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Node("#document")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        node = Node(tag, {k: (v or "") for k, v in attrs})
        self.stack[-1].children.append(node)
        if tag not in VOID_TAGS and len(self.stack) < _MAX_DEPTH:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self.stack[-1].children.append(Node(tag, {k: (v or "") for k, v in attrs}))

    def handle_endtag(self, tag):
        # pop to the nearest matching open tag; ignore stray closers
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def parse_html(text: str) -> Node:
    """Parse HTML (however malformed) into an element tree. Never raises."""
    builder = _TreeBuilder()
    try:
        builder.feed(text)
        builder.close()
    except Exception:  # html.parser is tolerant, but guarantee the contract
        pass
    return builder.root
