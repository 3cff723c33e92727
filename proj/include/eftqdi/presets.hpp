// Built-in six-sensor reproduction configs behind the `example-sec6` CLI
// subcommand. Case 1 runs the 1/k step schedule, case 2 the 1/k^{4/5}
// schedule; everything else is shared.

#pragma once

#include "eftqdi/config.hpp"

namespace eftqdi {

// case_id is 1 or 2.
ExperimentConfig six_sensor_example(int case_id);

}  // namespace eftqdi
