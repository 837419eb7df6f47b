# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
PLCopen TC6 XML (v2.01) codec for SFC POUs.

Parsing reads the SFC body of each POU into a normalized graph (node ids are the PLCopen `localId` values, step
order is document order) and elides divergence/convergence nodes into the reduced chart.  Emission normalizes the
chart and wires copies of the minimal per-kind fragments of a metadata template; graphical layout is not carried
(placeholder coordinates), IDEs regenerate it on import.

.. note::
 * Supported subset: SFC body elements and ST bodies for actions and transition conditions (inline, or referenced
   POU-level transitions).  Anything else is dropped with a warning, except non-ST bodies, which are rejected.
 * Action qualifiers are not carried by the reduced chart: `N` is emitted, other qualifiers are read as `N` with a
   warning.
"""
import copy
import logging
from pathlib import Path

from lxml import etree

from sfctools.model import VariableDecl
from sfctools.codecs.normalize import (NodeKind, GraphNode, NormalizedGraph, normalize, denormalize)
from sfctools.sfc_exceptions import (XmlError, SchemaError, UnsupportedError, TemplateError, NormalizationError)

__all__ = ['PLCOPEN_NS', 'XHTML_NS', 'DEFAULT_TEMPLATE', 'MetadataTemplate', 'parse_plcopen', 'parse_plcopen_project',
           'emit_plcopen']

log = logging.getLogger(__name__)

PLCOPEN_NS = 'http://www.plcopen.org/xml/tc6_0201'
XHTML_NS = 'http://www.w3.org/1999/xhtml'
DEFAULT_TEMPLATE = Path(__file__).resolve().parent.joinpath('templates', 'plcopen_template.xml')

SECTION_TAGS = (('inputVars', 'input'), ('outputVars', 'output'), ('localVars', 'local'))
ELEMENTARY_TYPES = ('BOOL', 'BYTE', 'WORD', 'DWORD', 'LWORD', 'SINT', 'INT', 'DINT', 'LINT', 'USINT', 'UINT',
                    'UDINT', 'ULINT', 'REAL', 'LREAL', 'TIME', 'DATE', 'DT', 'TOD')
STRING_TYPES = {'string': 'STRING', 'wstring': 'WSTRING'}
NON_ST_BODIES = {'LD': "Ladder Diagram", 'FBD': "Function Block Diagram", 'IL': "Instruction List",
                 'SFC': "Sequential Function Chart"}
SFC_NODE_TAGS = {kind.value: kind for kind in NodeKind if kind is not NodeKind.INITIAL_STEP}
ACTION_SUFFIX = '_Action'


def _local(tag):
    return etree.QName(tag).localname if isinstance(tag, str) else None


def _text(element):
    """ Text of an ST/xhtml body element (empty string if none). """
    para = element.find('{%s}p' % XHTML_NS)
    return ''.join((para if para is not None else element).itertext())


def _set_text(para, text):
    if text and ']]>' not in text and '\r' not in text:
        para.text = etree.CDATA(text)
    else:
        para.text = text


class MetadataTemplate:
    """
    Skeleton PLCopen project with one minimal fragment per element kind, taken from the first POU of a template
    file whose SFC body holds one element of each kind (plus one `variable` and one `action`).

    :ivar namespace: PLCopen namespace (schema version) of the template
    :ivar header:    fileHeader attributes (vendor information)
    """
    def __init__(self, root, source='<template>'):
        self.source = source
        self.namespace = etree.QName(root).namespace
        self._root = copy.deepcopy(root)
        header = self._root.find(self._q('fileHeader'))
        self.header = dict(header.attrib) if header is not None else {}
        self._fragments = {}

        pou = self._root.find('.//' + self._q('pou'))
        if pou is None:
            raise TemplateError('pou', "template '{}' has no POU".format(source))
        sfc = pou.find('{}/{}'.format(self._q('body'), self._q('SFC')))
        for element in (sfc if sfc is not None else []):
            self._fragments.setdefault(_local(element.tag), element)
        for kind, path in (('variable', ('interface', '//', 'variable')), ('action', ('actions', '/', 'action'))):
            element = pou.find(self._q(path[0]) + path[1] + self._q(path[2]))
            if element is not None:
                self._fragments[kind] = element

        # Empty the template POU: it becomes the skeleton of each emitted POU.
        for element in list(pou.iter(self._q('variable'), self._q('action'))):
            if element.getparent().tag != self._q('actionBlock'):
                element.getparent().remove(element)
        if sfc is not None:
            for element in list(sfc):
                sfc.remove(element)
        self._pou = pou
        pous = pou.getparent()
        for element in list(pous):
            pous.remove(element)

    def _q(self, name):
        return '{%s}%s' % (self.namespace, name)

    @classmethod
    def load(cls, path=None):
        """
        Loads a template file.

        :param path: Template file (None => template shipped with this package)
        :type  path: Union(str, Path, None)
        """
        path = Path(path or DEFAULT_TEMPLATE)
        parser = etree.XMLParser(remove_blank_text=True, remove_comments=True)
        try:
            root = etree.parse(str(path), parser).getroot()
        except (OSError, etree.XMLSyntaxError) as exc:
            raise XmlError("cannot load template '{}': {}".format(path, exc)) from exc
        return cls(root, source=str(path))

    @property
    def kinds(self):
        """ Fragment kinds available. """
        return frozenset(self._fragments)

    def fragment(self, kind):
        """ Returns a fresh copy of the fragment for a kind. """
        if kind not in self._fragments:
            raise TemplateError(kind, "template '{}' has no '{}' fragment".format(self.source, kind))
        return copy.deepcopy(self._fragments[kind])

    def project(self):
        """ Returns fresh copies of the project skeleton and of its (detached) POU skeleton. """
        root = copy.deepcopy(self._root)
        return root, root.find('.//' + self._q('pous')), copy.deepcopy(self._pou)


# ---------------------------------------------------------------------------------------------------------------
# Parsing.

class _PouReader:
    """ Reads one POU's SFC body into a normalized graph. """
    def __init__(self, pou, namespace):
        self.pou = pou
        self.ns = namespace
        self.name = pou.get('name')
        self.warnings = []

    def q(self, name):
        return '{%s}%s' % (self.ns, name) if self.ns else name

    def warn(self, message):
        message = "POU '{}': {}".format(self.name, message)
        log.warning(message)
        self.warnings.append(message)

    def variables(self):
        interface = self.pou.find(self.q('interface'))
        decls = []
        if interface is None:
            return decls
        known = {self.q(tag): section for tag, section in SECTION_TAGS}
        for block in interface:
            if not isinstance(block.tag, str):
                continue
            section = known.get(block.tag)
            if section is None:
                self.warn("dropped variable block '{}'".format(_local(block.tag)))
                continue
            for var in block.findall(self.q('variable')):
                decls.append(VariableDecl(var.get('name'), self.data_type(var), self.default_value(var), section))
        return decls

    def data_type(self, var):
        holder = var.find(self.q('type'))
        element = next((e for e in (holder if holder is not None else []) if isinstance(e.tag, str)), None)
        if element is None:
            raise SchemaError("variable '{}'".format(var.get('name')), "type missing")
        tag = _local(element.tag)
        if tag == 'derived':
            return element.get('name')
        if tag in STRING_TYPES:
            return STRING_TYPES[tag]
        if tag not in ELEMENTARY_TYPES:
            self.warn("variable '{}' has unsupported type '{}', kept by name".format(var.get('name'), tag))
        return tag

    def default_value(self, var):
        initial = var.find(self.q('initialValue'))
        if initial is None:
            return None
        simple = initial.find(self.q('simpleValue'))
        if simple is None:
            self.warn("variable '{}': structured initial value dropped".format(var.get('name')))
            return None
        return simple.get('value')

    def st_body(self, holder, what):
        """ ST text of a `body`/`inline` element; rejects other languages. """
        for element in holder:
            tag = _local(element.tag)
            if tag == 'ST':
                return _text(element)
            if tag in NON_ST_BODIES:
                raise UnsupportedError(what, "body in {} is not supported".format(NON_ST_BODIES[tag]))
        raise SchemaError(what, "body missing")

    def named_bodies(self, container, item):
        bodies = {}
        holder = self.pou.find(self.q(container))
        for element in (holder.findall(self.q(item)) if holder is not None else []):
            body = element.find(self.q('body'))
            what = "{} '{}'".format(item, element.get('name'))
            if body is None:
                raise SchemaError(what, "body missing")
            bodies[element.get('name')] = (body, what)
        return bodies

    def connections(self, element):
        refs = []
        for point in element.findall(self.q('connectionPointIn')):
            for conn in point.findall(self.q('connection')):
                ref = conn.get('refLocalId')
                if ref is None:
                    raise SchemaError("{} {}".format(_local(element.tag), element.get('localId')),
                                      "connection without refLocalId")
                refs.append(int(ref))
        return refs

    def condition(self, element, transitions):
        cond = element.find(self.q('condition'))
        what = "transition {}".format(element.get('localId'))
        if cond is None:
            raise SchemaError(what, "condition missing")
        inline = cond.find(self.q('inline'))
        if inline is not None:
            return self.st_body(inline, what)
        reference = cond.find(self.q('reference'))
        if reference is not None:
            name = reference.get('name')
            if name not in transitions:
                raise SchemaError(what, "referenced transition '{}' not defined".format(name))
            return self.st_body(*transitions[name])
        raise UnsupportedError(what, "graphical transition condition is not supported")

    def graph(self):
        sfc = self.pou.find('{}/{}'.format(self.q('body'), self.q('SFC')))
        actions = {name: self.st_body(body, what)
                   for name, (body, what) in self.named_bodies('actions', 'action').items()}
        transitions = self.named_bodies('transitions', 'transition')

        nodes, names, comments, step_order, bodies = [], {}, {}, [], {}
        placed = extensions = 0
        for element in sfc.iter():
            tag = _local(element.tag)
            if tag == 'position' and (element.get('x', '0'), element.get('y', '0')) != ('0', '0'):
                placed += 1
            elif tag == 'addData':
                extensions += 1
        for element in sfc:
            tag = _local(element.tag)
            if tag is None:
                continue
            local_id = element.get('localId')
            if tag in SFC_NODE_TAGS or tag == 'actionBlock':
                if local_id is None:
                    raise SchemaError(tag, "localId missing")
                local_id = int(local_id)
            if tag == 'step':
                name = element.get('name')
                if not name:
                    raise SchemaError("step {}".format(local_id), "name missing")
                kind = NodeKind.INITIAL_STEP if element.get('initialStep') in ('true', '1') else NodeKind.STEP
                nodes.append(GraphNode(local_id, kind, self.connections(element)))
                names[local_id] = name
                step_order.append(local_id)
                doc = element.find(self.q('documentation'))
                if doc is not None:
                    comments[local_id] = _text(doc)
            elif tag == 'transition':
                nodes.append(GraphNode(local_id, NodeKind.TRANSITION, self.connections(element),
                                       guard=self.condition(element, transitions)))
            elif tag == 'jumpStep':
                nodes.append(GraphNode(local_id, NodeKind.JUMP_STEP, self.connections(element),
                                       target=element.get('targetName')))
            elif tag in SFC_NODE_TAGS:
                nodes.append(GraphNode(local_id, SFC_NODE_TAGS[tag], self.connections(element)))
            elif tag == 'actionBlock':
                self.action_block(element, actions, bodies)
            elif tag == 'macroStep':
                raise UnsupportedError("macroStep {}".format(local_id), "macro steps are not supported")
            else:
                self.warn("dropped SFC element '{}'".format(tag))
        if placed:
            self.warn("discarded layout coordinates of {} elements".format(placed))
        if extensions:
            self.warn("discarded {} vendor extension (addData) elements".format(extensions))

        nodes.sort(key=lambda n: n.id)
        for step_id in bodies:
            if step_id not in names:
                raise SchemaError("actionBlock", "attached to {}, which is not a step".format(step_id))
        return NormalizedGraph(pou_name=self.name, variables=tuple(self.variables()), nodes=tuple(nodes),
                               names=names, actions={k: '\n'.join(v) for k, v in bodies.items()},
                               comments=comments, step_order=tuple(step_order))

    def action_block(self, element, actions, bodies):
        steps = self.connections(element)
        if len(steps) != 1:
            raise SchemaError("actionBlock {}".format(element.get('localId')), "must be connected to one step")
        for action in element.findall(self.q('action')):
            qualifier = action.get('qualifier', 'N')
            reference = action.find(self.q('reference'))
            inline = action.find(self.q('inline'))
            if reference is not None:
                name = reference.get('name')
                if name not in actions:
                    raise SchemaError("actionBlock {}".format(element.get('localId')),
                                      "referenced action '{}' not defined".format(name))
                text = actions[name]
            elif inline is not None:
                text = self.st_body(inline, "actionBlock {}".format(element.get('localId')))
            else:
                raise SchemaError("actionBlock {}".format(element.get('localId')), "action has no body")
            if qualifier != 'N':
                self.warn("action qualifier '{}' on step {} read as 'N'".format(qualifier, steps[0]))
            bodies.setdefault(steps[0], []).append(text)
        if len(bodies.get(steps[0], [])) > 1:
            self.warn("several actions on step {} concatenated".format(steps[0]))


def _parse_xml(xml):
    if isinstance(xml, str):
        xml = xml.encode('utf-8')
    try:
        return etree.fromstring(xml, etree.XMLParser(remove_comments=True, resolve_entities=False))
    except etree.XMLSyntaxError as exc:
        raise XmlError("malformed XML: {}".format(exc)) from exc


def parse_plcopen_project(xml):
    """
    Parses every SFC POU of a PLCopen project.

    :param xml: PLCopen XML document
    :type  xml: Union(str, bytes)

    :return: One (chart, warnings) pair per POU with an SFC body, in document order
    :rtype:  list(tuple(ReducedSfc, list(str)))

    :raises XmlError:         Malformed XML
    :raises SchemaError:      Required PLCopen elements missing or inconsistent
    :raises UnsupportedError: Non-ST action or transition bodies
    """
    root = _parse_xml(xml)
    namespace = etree.QName(root).namespace
    if etree.QName(root).localname != 'project':
        raise SchemaError('project', "root element is '{}'".format(etree.QName(root).localname))
    if namespace != PLCOPEN_NS:
        log.warning("PLCopen namespace '{}' differs from '{}'; reading anyway".format(namespace, PLCOPEN_NS))
    pou_tag = '{%s}pou' % namespace if namespace else 'pou'
    sfc_path = '{0}body/{0}SFC'.format('{%s}' % namespace if namespace else '')
    results = []
    for pou in root.iter(pou_tag):
        if pou.find(sfc_path) is None:
            log.info("POU '{}' has no SFC body; skipped".format(pou.get('name')))
            continue
        reader = _PouReader(pou, namespace)
        graph = reader.graph()
        try:
            chart = denormalize(graph, strict=False)
        except NormalizationError as exc:
            raise SchemaError("POU '{}' node {}".format(reader.name, exc.node), str(exc)) from exc
        results.append((chart, reader.warnings))
    if not results:
        raise SchemaError('pou', "no POU with an SFC body")
    return results


def parse_plcopen(xml, pou=None):
    """
    Parses one SFC POU of a PLCopen project.

    :param xml: PLCopen XML document
    :type  xml: Union(str, bytes)
    :param pou: Name of the POU to read (None => first SFC POU)
    :type  pou: Union(str, None)

    :return: (chart, warnings)
    :rtype:  tuple(ReducedSfc, list(str))
    """
    results = parse_plcopen_project(xml)
    if pou is None:
        return results[0]
    for chart, warnings in results:
        if chart.pou_name == pou:
            return chart, warnings
    raise SchemaError('pou', "no SFC POU named '{}'".format(pou))


# ---------------------------------------------------------------------------------------------------------------
# Emission.

def _connect(template, element, parents):
    """ Rewires the connectionPointIn element(s) of a fragment to `parents` (one point per parent for nodes with
        several inputs; none if there are no parents). """
    ns = template.namespace
    points = element.findall('{%s}connectionPointIn' % ns)
    if not points:
        return
    model = copy.deepcopy(points[0])
    for conn in model.findall('{%s}connection' % ns):
        model.remove(conn)
    anchor = points[0].getprevious()
    for point in points:
        element.remove(point)
    several = _local(element.tag) in ('selectionConvergence', 'simultaneousConvergence')
    groups = [[p] for p in parents] if several else ([parents] if parents else [])
    for group in reversed(groups):
        point = copy.deepcopy(model)
        for parent in group:
            etree.SubElement(point, '{%s}connection' % ns, refLocalId=str(parent))
        if anchor is None:
            element.insert(0, point)
        else:
            anchor.addnext(point)


def _fan_out(template, element, count):
    """ Replicates a divergence fragment's connectionPointOut to one per child. """
    ns = template.namespace
    points = element.findall('{%s}connectionPointOut' % ns)
    for point in points[1:]:
        element.remove(point)
    for _ in range(count - 1):
        points[0].addnext(copy.deepcopy(points[0]))


def _set_st(template, holder, text):
    ns = template.namespace
    st = holder.find('.//{%s}ST' % ns)
    for child in list(st):
        st.remove(child)
    _set_text(etree.SubElement(st, '{%s}p' % XHTML_NS), text)


def _emit_variable(template, sfc_var):
    ns = template.namespace
    var = template.fragment('variable')
    var.set('name', sfc_var.name)
    holder = var.find('{%s}type' % ns)
    for child in list(holder):
        holder.remove(child)
    if sfc_var.data_type in ELEMENTARY_TYPES:
        etree.SubElement(holder, '{%s}%s' % (ns, sfc_var.data_type))
    elif sfc_var.data_type in STRING_TYPES.values():
        etree.SubElement(holder, '{%s}%s' % (ns, sfc_var.data_type.lower()))
    else:
        etree.SubElement(holder, '{%s}derived' % ns, name=sfc_var.data_type)
    initial = var.find('{%s}initialValue' % ns)
    if sfc_var.default_value is None:
        if initial is not None:
            var.remove(initial)
    else:
        if initial is None:
            initial = etree.SubElement(var, '{%s}initialValue' % ns)
        for child in list(initial):
            initial.remove(child)
        etree.SubElement(initial, '{%s}simpleValue' % ns, value=sfc_var.default_value)
    return var


def _emit_node(template, node, graph, child_count):
    ns = template.namespace
    kind = NodeKind.STEP if node.is_step else node.kind
    element = template.fragment(kind.value)
    element.set('localId', str(node.id))
    _connect(template, element, node.parents)
    if node.is_step:
        element.set('name', graph.names[node.id])
        element.set('initialStep', 'true' if node.kind is NodeKind.INITIAL_STEP else 'false')
        action_point = element.find('{%s}connectionPointOutAction' % ns)
        if node.id not in graph.actions and action_point is not None:
            element.remove(action_point)
        doc = element.find('{%s}documentation' % ns)
        if doc is not None:
            element.remove(doc)
        if node.id in graph.comments:
            doc = etree.SubElement(element, '{%s}documentation' % ns)
            _set_text(etree.SubElement(doc, '{%s}p' % XHTML_NS), graph.comments[node.id])
    elif node.kind is NodeKind.TRANSITION:
        _set_st(template, element.find('{%s}condition' % ns), node.guard)
    elif node.kind is NodeKind.JUMP_STEP:
        element.set('targetName', node.target)
    elif node.kind in (NodeKind.SELECTION_DIVERGENCE, NodeKind.SIMULTANEOUS_DIVERGENCE):
        _fan_out(template, element, child_count)
    return element


def emit_plcopen(sfc, template=None):
    """
    Renders a valid chart as a PLCopen XML project with one SFC POU.

    :param sfc:      Chart (strictly valid and normalizable)
    :type  sfc:      ReducedSfc
    :param template: Metadata template (None => shipped template)
    :type  template: Union(MetadataTemplate, None)

    :return: XML document text (deterministic for a given chart and template)
    :rtype:  str

    :raises TemplateError: Template lacks a fragment kind the chart needs
    """
    template = template or MetadataTemplate.load()
    graph = normalize(sfc)
    needed = {NodeKind.STEP.value if n.is_step else n.kind.value for n in graph.nodes}
    if graph.actions:
        needed |= {'actionBlock', 'action'}
    if graph.variables:
        needed.add('variable')
    missing = sorted(needed - template.kinds)
    if missing:
        kind = missing[0]
        raise TemplateError(kind, "template '{}' has no '{}' fragment".format(template.source, kind))
    try:
        root = _build_project(template, graph)
    except ValueError as exc:
        raise UnsupportedError(graph.pou_name, "text not representable in XML: {}".format(exc)) from exc
    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding='utf-8').decode('utf-8')


def _build_project(template, graph):
    ns = template.namespace
    root, pous, pou = template.project()
    pou.set('name', graph.pou_name)
    interface = pou.find('{%s}interface' % ns)
    for tag, section in SECTION_TAGS:
        block = interface.find('{%s}%s' % (ns, tag))
        if block is None:
            block = etree.SubElement(interface, '{%s}%s' % (ns, tag))
        for var in graph.variables:
            if var.section == section:
                block.append(_emit_variable(template, var))

    action_names = {step_id: graph.names[step_id] + ACTION_SUFFIX for step_id in graph.actions}
    actions = pou.find('{%s}actions' % ns)
    if graph.actions:
        for step_id in graph.step_order:
            if step_id in graph.actions:
                action = template.fragment('action')
                action.set('name', action_names[step_id])
                _set_st(template, action.find('{%s}body' % ns), graph.actions[step_id])
                actions.append(action)
    elif actions is not None:
        pou.remove(actions)

    body = pou.find('{%s}body/{%s}SFC' % (ns, ns))
    children = graph.children_map()
    index = {n.id: n for n in graph.nodes}
    ordered = [index[i] for i in graph.step_order] + [n for n in graph.nodes if not n.is_step]
    for node in ordered:
        body.append(_emit_node(template, node, graph, len(children[node.id])))
    next_id = max(index) + 1
    for step_id in graph.step_order:
        if step_id not in graph.actions:
            continue
        block = template.fragment('actionBlock')
        block.set('localId', str(next_id))
        _connect(template, block, [step_id])
        for extra in block.findall('{%s}action' % ns)[1:]:
            block.remove(extra)
        action = block.find('{%s}action' % ns)
        action.set('localId', str(next_id + 1))
        action.set('qualifier', 'N')
        action.find('{%s}reference' % ns).set('name', action_names[step_id])
        body.append(block)
        next_id += 2

    pous.append(pou)
    return root
