#pragma once

#include "hspace/errors.hpp"
#include "hspace/hausdorff.hpp"
#include "hspace/ifs.hpp"
#include "hspace/io.hpp"
#include "hspace/metric.hpp"
#include "hspace/sequence.hpp"
