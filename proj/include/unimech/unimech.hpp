#pragma once

#include "unimech/errors.hpp"
#include "unimech/tensor.hpp"
#include "unimech/lie_algebra.hpp"
#include "unimech/unified_product.hpp"
#include "unimech/dynamics.hpp"
#include "unimech/jets.hpp"
#include "unimech/third_order.hpp"
#include "unimech/models.hpp"
#include "unimech/io.hpp"
#include "unimech/runner.hpp"
