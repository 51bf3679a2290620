#include <math.h>
#include <stdio.h>
#include "ffdirac.h"

int main(int argc, char **argv) {
    FfdConfig *cfg = NULL;
    FfdReport *rep = NULL;
    if (ffd_config_from_toml("preset = \"fig1\"\ndt = 0.0078125\n[grid]\nn_points = 64\n", &cfg) != FFD_STATUS_OK) {
        fprintf(stderr, "config: %s\n", ffd_last_error_message());
        return 1;
    }
    if (ffd_run(cfg, &rep) != FFD_STATUS_OK) {
        fprintf(stderr, "run: %s\n", ffd_last_error_message());
        return 1;
    }
    double ff, un;
    ffd_report_pair_production(rep, &ff, &un);
    printf("%.3e %.3e\n", ff, un);
    if (argc > 1 && ffd_report_write(rep, argv[1]) != FFD_STATUS_OK) return 1;
    ffd_report_free(rep);
    ffd_config_free(cfg);
    return (ff < 1e-6 && un > 1e-4) ? 0 : 2;
}
