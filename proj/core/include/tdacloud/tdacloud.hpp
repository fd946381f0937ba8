#pragma once

#include "tdacloud/atol.hpp"
#include "tdacloud/delaunay.hpp"
#include "tdacloud/descriptor_index.hpp"
#include "tdacloud/errors.hpp"
#include "tdacloud/filtration.hpp"
#include "tdacloud/parallel.hpp"
#include "tdacloud/persistence.hpp"
#include "tdacloud/point_cloud.hpp"
#include "tdacloud/predicates.hpp"
#include "tdacloud/text_format.hpp"
