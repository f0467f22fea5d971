/* Minimal consumer of the C API: parse an expression, differentiate it,
 * check a Taylor identity and a diagram file, take one Lie bracket.
 *
 * Build (from the repository root, after `cargo build -p weil-capi`):
 *   cc crates/weil-capi/examples/demo.c \
 *      -Icrates/weil-capi/include \
 *      target/debug/libweil_capi.a -lpthread -ldl -lm -o demo
 */
#include <stdio.h>
#include <weil.h>

int main(int argc, char **argv) {
    WeilExpr *e = NULL;
    if (weil_expr_parse("x^3 + 2*x", &e) != WEIL_STATUS_OK) {
        fprintf(stderr, "parse failed\n");
        return 1;
    }

    char *deriv = NULL;
    if (weil_derive(e, "2", 1, &deriv) != WEIL_STATUS_OK) {
        fprintf(stderr, "derivative failed\n");
        return 1;
    }
    printf("d/dx (x^3 + 2*x) at 2 = %s\n", deriv);
    weil_string_free(deriv);

    bool holds = false;
    weil_taylor_check(e, "1", 3, &holds);
    printf("taylor identity at order 3: %s\n", holds ? "ok" : "FAILED");
    weil_expr_free(e);

    char *u = NULL;
    if (weil_bracket(1, "[x]", "[x^2]", &u) != WEIL_STATUS_OK) {
        fprintf(stderr, "bracket failed\n");
        return 1;
    }
    printf("[x, x^2] = %s\n", u);
    weil_string_free(u);

    if (argc > 1) {
        WeilVerdict v;
        if (weil_check_diagram(argv[1], &v) != WEIL_STATUS_OK) {
            fprintf(stderr, "diagram check failed\n");
            return 1;
        }
        printf("%s: apex %zu / limit %zu / image %zu -> %s\n", argv[1],
               v.apex_dim, v.limit_dim, v.image_dim,
               v.is_quasi_colimit ? "quasi-colimit" : "NOT a quasi-colimit");
    }
    return holds ? 0 : 1;
}
