#include <math.h>
#include <stdio.h>

#include "hr_sync.h"

int main(void) {
    HrParameters params = hr_parameters_test_set(6.0);
    double p_star = 0.0;
    if (hr_sync_threshold(&params, &p_star) != HR_STATUS_OK || p_star != 5.0) {
        return 1;
    }

    HrSimulation *sim = NULL;
    if (hr_simulation_new(&params, 1, 41, 1.0, 1e-3, HR_SCHEME_IMEX_STRANG, &sim) != HR_STATUS_OK) {
        return 2;
    }
    hr_simulation_init_fourier(sim, 1, 1.0);

    HrRecord start, end;
    hr_simulation_diagnostics(sim, &start);
    if (hr_simulation_advance(sim, 3000) != HR_STATUS_OK) {
        return 3;
    }
    hr_simulation_diagnostics(sim, &end);
    printf("t = %g, sync_l %.6e -> %.6e\n", end.t, start.sync_l, end.sync_l);

    HrStatus bad = hr_simulation_state(sim, NULL, 0);
    char msg[64];
    hr_last_error_message(msg, sizeof msg);
    printf("expected error: %s\n", msg);

    hr_simulation_free(sim);
    return (end.sync_l < start.sync_l * exp(-3.0) && bad == HR_STATUS_NULL_POINTER) ? 0 : 4;
}
