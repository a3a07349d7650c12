#pragma once

namespace monotone_lab {

/// Worker thread count: the OpenMP default, capped by MONOTONE_LAB_THREADS when set.
int thread_count();

}  // namespace monotone_lab
