/* Generated by hlsrestruct (template huffman_tree). Do not edit. */
#ifndef HUFFMAN_TREE_H
#define HUFFMAN_TREE_H

#include <stdint.h>

#define HUFF_SIZE 536

typedef uint16_t sym_t;
typedef uint32_t freq_t;
typedef uint16_t addr_t;

/* child slot holding an internal node rather than a symbol */
#define INTERNAL_NODE ((sym_t)~(sym_t)0)
#define NO_PARENT ((addr_t)~(addr_t)0)

void huffman_create_tree(const sym_t SF_S[HUFF_SIZE], const freq_t SF_F[HUFF_SIZE],
                         addr_t ParentAddress[HUFF_SIZE - 1],
                         sym_t Left[HUFF_SIZE - 1], sym_t Right[HUFF_SIZE - 1]);

void huffman_bit_lengths(const addr_t ParentAddress[HUFF_SIZE - 1],
                         const sym_t Left[HUFF_SIZE - 1], const sym_t Right[HUFF_SIZE - 1],
                         sym_t Symbol[HUFF_SIZE], uint16_t Length[HUFF_SIZE]);

#endif /* HUFFMAN_TREE_H */
