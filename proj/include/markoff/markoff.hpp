#pragma once

#include "tree.hpp"
#include "hurwitz.hpp"
#include "group.hpp"
#include "bowditch.hpp"
#include "identity.hpp"
#include "slice.hpp"
