/* Generated by hlsrestruct (template conv2d_stream). Do not edit.
 *
 * 3x3 streaming convolution over a 640x480 image: a
 * 3-row line buffer feeds a 3x3 window buffer, one pixel per cycle.
 * out[c] = D_x + D_y at interior centers, 0 on the border.
 */
#include "conv2d_stream.h"

#define HALF (CONV_K / 2)
#define LATENCY (HALF * IMAGE_WIDTH + HALF)
#define NUM_PIXELS (IMAGE_HEIGHT * IMAGE_WIDTH)

static const int8_t G_x[CONV_K][CONV_K] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
static const int8_t G_y[CONV_K][CONV_K] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};

static acc_t window_filter(pix_t window[CONV_K][CONV_K])
{
    acc_t D_x = 0;
    acc_t D_y = 0;
    for (int r = 0; r < CONV_K; r++) {
        for (int c = 0; c < CONV_K; c++) {
            D_x += (acc_t)window[r][c] * G_x[r][c];
            D_y += (acc_t)window[r][c] * G_y[r][c];
        }
    }
    return D_x + D_y;
}

void conv2d_stream(const pix_t image[NUM_PIXELS], acc_t out[NUM_PIXELS])
{
    pix_t LineBuffer[CONV_K][IMAGE_WIDTH];
    pix_t WindowBuffer[CONV_K][CONV_K];
    int col = 0;
    int out_row = 0;
    int out_col = 0;

    for (int k = 0; k < CONV_K; k++) {
        for (int j = 0; j < IMAGE_WIDTH; j++) {
            LineBuffer[k][j] = 0;
        }
        for (int c = 0; c < CONV_K; c++) {
            WindowBuffer[k][c] = 0;
        }
    }

    for (int p = 0; p < NUM_PIXELS; p++) {
#pragma HLS PIPELINE
        pix_t column[CONV_K];

        /* vertical line buffer shift: one read and one write per row */
        for (int k = 0; k < CONV_K - 1; k++) {
            column[k] = LineBuffer[k + 1][col];
        }
        column[CONV_K - 1] = image[p];
        for (int k = 0; k < CONV_K; k++) {
            LineBuffer[k][col] = column[k];
        }

        /* window shift: drop the oldest column, append the new one */
        for (int k = 0; k < CONV_K; k++) {
            for (int c = 0; c < CONV_K - 1; c++) {
                WindowBuffer[k][c] = WindowBuffer[k][c + 1];
            }
            WindowBuffer[k][CONV_K - 1] = column[k];
        }

        if (p >= LATENCY) {
            int interior = out_row >= HALF && out_row < IMAGE_HEIGHT - HALF
                        && out_col >= HALF && out_col < IMAGE_WIDTH - HALF;
            out[p - LATENCY] = interior ? window_filter(WindowBuffer) : 0;
            out_col++;
            if (out_col == IMAGE_WIDTH) {
                out_col = 0;
                out_row++;
            }
        }

        col++;
        if (col == IMAGE_WIDTH) {
            col = 0;
        }
    }

    /* centers still in flight at the end are all on the border */
    for (int p = NUM_PIXELS - LATENCY; p < NUM_PIXELS; p++) {
        out[p] = 0;
    }
}

#ifdef HLSR_HARNESS
#include <stdio.h>
#include <stdlib.h>

int main(void)
{
    pix_t *image = malloc(sizeof(pix_t) * NUM_PIXELS);
    acc_t *out = malloc(sizeof(acc_t) * NUM_PIXELS);
    if (image == NULL || out == NULL) {
        return 1;
    }
    for (long i = 0; i < NUM_PIXELS; i++) {
        unsigned long v;
        if (scanf("%lu", &v) != 1) {
            fprintf(stderr, "expected %d pixels\n", NUM_PIXELS);
            return 2;
        }
        image[i] = (pix_t)v;
    }
    conv2d_stream(image, out);
    for (long i = 0; i < NUM_PIXELS; i++) {
        printf("%lld\n", (long long)out[i]);
    }
    free(image);
    free(out);
    return 0;
}
#endif /* HLSR_HARNESS */
