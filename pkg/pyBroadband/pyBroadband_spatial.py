#!/usr/bin/env python
'''
pyBroadband_spatial

Holds the Adjacency Graph Class and the Moran's I spatial autocorrelation
routines.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 03/05/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Permutation Test (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import DegenerateVariance, TooFewNodes

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


# =============================================================================
# Adjacency Graph Class
# =============================================================================
class AdjacencyGraph(object):

    '''
    Symmetric, self-loop-free block group neighborhood graph
    '''

    def __init__(self, nodes=None):

        self.nodes = []
        self._index = {}
        self._edges = {}
        for node in (nodes or []):
            self.add_node(node)
        #end


    def add_node(self, node):

        if node not in self._index:
            self._index[node] = len(self.nodes)
            self.nodes.append(node)
            self._edges[node] = {}
        #end


    def add_edge(self, a, b, weight=1.0):

        '''
        Add an undirected edge; self edges are dropped

        **Arguments:**

        - a, b -> STR: GEOIDs

        **Keyword arguments:**

        - weight -> FLOAT: Nonnegative weight before standardization, *Default* = 1.0
        '''

        self.add_node(a)
        self.add_node(b)
        if a == b:
            return False
        #end
        if weight < 0:
            raise ValueError('Edge weight must be nonnegative (%s, %s, %g)' %(a,b,weight))
        #end
        self._edges[a][b] = float(weight)
        self._edges[b][a] = float(weight)

        return True


    def neighbors(self, node):

        return sorted(self._edges[node].keys())


    def n_edges(self):

        return sum([len(item) for item in self._edges.values()]) // 2


    def isolated(self):

        return [node for node in self.nodes if len(self._edges[node]) == 0]


    def is_symmetric(self):

        for a in self.nodes:
            if a in self._edges[a]:
                return False
            #end
            for b, weight in self._edges[a].items():
                if self._edges[b].get(a) != weight:
                    return False
                #end
            #end
        #end

        return True


    def subgraph(self, nodes):

        keep = set(nodes)
        graph = AdjacencyGraph([node for node in self.nodes if node in keep])
        for a in graph.nodes:
            for b, weight in self._edges[a].items():
                if b in keep:
                    graph.add_edge(a, b, weight)
                #end
            #end
        #end

        return graph


    def weight_matrix(self, standardize=True):

        '''
        Dense weight matrix in node order, row standardized by default
        '''

        n = len(self.nodes)
        matrix = numpy.zeros((n,n))
        for a in self.nodes:
            for b, weight in self._edges[a].items():
                matrix[self._index[a],self._index[b]] = weight
            #end
        #end
        if standardize:
            sums = matrix.sum(axis=1)
            rows = sums > 0
            matrix[rows] = matrix[rows] / sums[rows][:,numpy.newaxis]
        #end

        return matrix


    def __str__(self):

        return 'AdjacencyGraph(%d nodes, %d edges, %d isolated)' %(len(self.nodes), self.n_edges(), len(self.isolated()))



def _prepare(values, graph):

    '''
    Value vector and row standardized weights over the valued, non-isolated nodes
    '''

    sub = graph.subgraph([node for node in graph.nodes if node in values])
    sub = sub.subgraph([node for node in sub.nodes if node not in set(sub.isolated())])
    if len(sub.nodes) < 2:
        raise TooFewNodes("Moran's I needs at least 2 non-isolated nodes (got %d)" %(len(sub.nodes)))
    #end
    x = numpy.array([values[node] for node in sub.nodes], dtype=float)
    if numpy.ptp(x) == 0:
        raise DegenerateVariance("Moran's I is undefined for constant values")
    #end

    return x, sub.weight_matrix(standardize=True)


def _statistic(z, weights):

    return len(z)/weights.sum() * (z @ weights @ z) / (z @ z)


#==============================================================================
# morans_i function
#==============================================================================
def morans_i(values, graph):

    '''
    Global Moran's I over row standardized weights

    I = (N / W) * sum_ij w_ij z_i z_j / sum_i z_i^2 with z = x - mean(x).
    Nodes without a value and nodes left isolated are excluded.

    **Arguments:**

    - values -> DICT: GEOID -> value
    - graph -> INST: AdjacencyGraph
    '''

    x, weights = _prepare(values, graph)

    return float(_statistic(x - x.mean(), weights))


# =============================================================================
# Moran Result Class
# =============================================================================
class MoranResult(object):

    def __init__(self, statistic, expected, p_value, n, permutations):

        self.statistic = statistic
        self.expected = expected
        self.p_value = p_value
        self.n = n
        self.permutations = permutations


    def __repr__(self):

        return "MoranResult(I=%.4f, E[I]=%.4f, p=%.4f, n=%d)" %(self.statistic, self.expected, self.p_value, self.n)



#==============================================================================
# morans_i_test function
#==============================================================================
def morans_i_test(values, graph, permutations=999, seed=0):

    '''
    Moran's I with its null expectation and a permutation pseudo p-value

    The p-value is one-sided in the direction of the observed statistic:
    (extreme + 1) / (permutations + 1).

    **Arguments:**

    - values -> DICT: GEOID -> value
    - graph -> INST: AdjacencyGraph

    **Keyword arguments:**

    - permutations -> INT: Random relabelings, *Default* = 999
    - seed -> INT: Generator seed, *Default* = 0
    '''

    x, weights = _prepare(values, graph)
    z = x - x.mean()
    observed = float(_statistic(z, weights))
    expected = -1.0/(len(z) - 1)

    #
    rng = numpy.random.default_rng(seed)
    draws = numpy.array([_statistic(rng.permutation(z), weights) for i in range(permutations)])
    if observed >= expected:
        extreme = int((draws >= observed).sum())
    else:
        extreme = int((draws <= observed).sum())
    #end

    return MoranResult(observed, expected, (extreme + 1.0)/(permutations + 1.0), len(z), permutations)



#==============================================================================
# Spatial Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Spatial...')
    graph = AdjacencyGraph()
    graph.add_edge('A','B')
    graph.add_edge('B','C')
    print(graph, morans_i({'A':1.0,'B':2.0,'C':3.0}, graph))
