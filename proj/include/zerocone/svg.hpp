#pragma once

#include <string>

#include "zerocone/dataset.hpp"
#include "zerocone/json_io.hpp"

namespace zerocone {

// Renders the dataset and the idealized action of each truncation step as a
// row of SVG panels: panel 0 is the raw data, panel l shows the data after
// the first l collapses with the next cone's apex and boundary rays overlaid
// on the panel it acts on. Points are projected onto the first two
// barycentric coordinates. Output is byte-stable for fixed inputs.
std::string plot_trace(const LabeledDataset& ds, const TraceSummary& trace);

} // namespace zerocone
